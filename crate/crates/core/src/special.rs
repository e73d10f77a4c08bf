//! Special functions: complex log-gamma, the Gauss hypergeometric function on
//! the unit interval, and Gauss-Hermite / Gauss-Legendre rules.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;

use crate::error::{Error, Result};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Γ(z) on the principal sheet up to multiples of 2πi (only exp of it is
/// meaningful). Lanczos approximation with reflection for Re z < 1/2.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    if z.re < 0.5 {
        let pi = Complex64::new(PI, 0.0);
        return pi.ln() - (pi * z).sin().ln() - ln_gamma(1.0 - z);
    }
    let z = z - 1.0;
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &p) in LANCZOS.iter().enumerate().skip(1) {
        x += p / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (z + 0.5) * t.ln() - t + x.ln()
}

pub fn gamma(z: Complex64) -> Complex64 {
    ln_gamma(z).exp()
}

const SERIES_MAX_TERMS: usize = 5000;

/// Σ (a)_j (b)_j / ((c)_j j!) z^j for |z| ≤ 1/2. Stops once three consecutive
/// terms fall below 1e−16 of the partial sum.
pub fn hyp2f1_series(a: Complex64, b: Complex64, c: Complex64, z: f64) -> Result<Complex64> {
    let mut sum = Complex64::new(1.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut small = 0;
    for j in 0..SERIES_MAX_TERMS {
        let jf = j as f64;
        term *= (a + jf) * (b + jf) / ((c + jf) * (jf + 1.0)) * z;
        sum += term;
        if term.norm() <= 1e-16 * sum.norm() {
            small += 1;
            if small == 3 {
                return Ok(sum);
            }
        } else {
            small = 0;
        }
    }
    Err(Error::SeriesNonConvergence { terms: SERIES_MAX_TERMS })
}

/// ₂F₁(a, b; c; ·) on [0, 1) with the connection coefficients for the
/// z ↦ 1 − z transformation precomputed. c − a − b must not be an integer.
#[derive(Debug, Clone, Copy)]
pub struct Hyp2F1 {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    /// Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b))
    near: Complex64,
    /// Γ(c)Γ(a+b−c)/(Γ(a)Γ(b))
    far: Complex64,
}

impl Hyp2F1 {
    pub fn new(a: Complex64, b: Complex64, c: Complex64) -> Self {
        let s = c - a - b;
        let lc = ln_gamma(c);
        let near = (lc + ln_gamma(s) - ln_gamma(c - a) - ln_gamma(c - b)).exp();
        let far = (lc + ln_gamma(-s) - ln_gamma(a) - ln_gamma(b)).exp();
        Self { a, b, c, near, far }
    }

    /// Value at z ∈ [0, 1); `ln_one_minus_z` = ln(1 − z) supplied by the caller
    /// so that it can be formed without cancellation.
    pub fn eval(&self, z: f64, ln_one_minus_z: f64) -> Result<Complex64> {
        let (a, b, c) = (self.a, self.b, self.c);
        if z <= 0.5 {
            return hyp2f1_series(a, b, c, z);
        }
        let w = 1.0 - z;
        let s = c - a - b;
        let first = hyp2f1_series(a, b, 1.0 - s, w)?;
        let second = hyp2f1_series(c - a, c - b, 1.0 + s, w)?;
        Ok(self.near * first + self.far * (s * ln_one_minus_z).exp() * second)
    }
}

/// Gauss-Hermite rule for ∫ e^{−u²} f(u) du. Weights are stored as
/// ln(w_i) + u_i² so that rules with hundreds of nodes stay representable.
#[derive(Debug)]
pub struct GaussHermite {
    pub nodes: Vec<f64>,
    pub log_scaled_weights: Vec<f64>,
}

impl GaussHermite {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut diag = vec![0.0; n];
        let mut off: Vec<f64> = (1..=n).map(|k| (k as f64 / 2.0).sqrt()).collect();
        off[n - 1] = 0.0;
        tridiagonal_eigenvalues(&mut diag, &mut off);
        diag.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut nodes = Vec::with_capacity(n);
        let mut log_scaled_weights = Vec::with_capacity(n);
        for &guess in &diag {
            let mut x = guess;
            for _ in 0..3 {
                let (pn, pn1, _) = orthonormal_hermite(n, x);
                let step = pn / ((2.0 * n as f64).sqrt() * pn1);
                x -= step;
                if step.abs() < 1e-15 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, pn1, log_scale) = orthonormal_hermite(n, x);
            let log_p = pn1.abs().ln() + log_scale;
            nodes.push(x);
            log_scaled_weights.push(-(n as f64).ln() - 2.0 * log_p + x * x);
        }
        Self { nodes, log_scaled_weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Shared, lazily built rule with `n` nodes.
    pub fn cached(n: usize) -> Arc<GaussHermite> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(rule) = cache.lock().unwrap().get(&n) {
            return rule.clone();
        }
        let rule = Arc::new(GaussHermite::new(n));
        cache.lock().unwrap().entry(n).or_insert(rule).clone()
    }
}

/// Orthonormal Hermite polynomials p̃_n(x), p̃_{n−1}(x) (with respect to
/// e^{−x²}), returned with a common natural-log scale factor.
fn orthonormal_hermite(n: usize, x: f64) -> (f64, f64, f64) {
    let mut p_prev = 0.0;
    let mut p = PI.powf(-0.25);
    let mut log_scale = 0.0;
    for j in 0..n {
        let jf = j as f64;
        let next = (2.0 / (jf + 1.0)).sqrt() * x * p - (jf / (jf + 1.0)).sqrt() * p_prev;
        p_prev = p;
        p = next;
        if p.abs() > 1e150 {
            p *= 1e-150;
            p_prev *= 1e-150;
            log_scale += 150.0 * std::f64::consts::LN_10;
        }
    }
    (p, p_prev, log_scale)
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL; `off[i]`
/// couples rows i and i+1, `off[n−1]` is ignored. Results overwrite `diag`.
fn tridiagonal_eigenvalues(diag: &mut [f64], off: &mut [f64]) {
    let n = diag.len();
    if n == 0 {
        return;
    }
    off[n - 1] = 0.0;
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let scale = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * scale {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            assert!(iterations < 100, "tridiagonal QL failed to converge");
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut deflated = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if deflated {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
}

/// Gauss-Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for j in 2..=n {
                let jf = j as f64;
                let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 {
                1.0
            } else if n == 1 {
                x
            } else {
                p1
            };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pn1) / (x * x - 1.0);
            let step = pn / dp;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}
