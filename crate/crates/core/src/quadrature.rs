//! One-dimensional quadrature: compensated summation, adaptive Gauss-Kronrod,
//! and Gauss rules for the symmetric weights `(1 - t^2)^a` used by the
//! sphere grids.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Neumaier (improved Kahan-Babuska) running sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(it: I) -> f64 {
    let mut s = CompensatedSum::new();
    for x in it {
        s.add(x);
    }
    s.value()
}

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1]
// (abscissae listed from the endpoint inwards; the last one is the centre).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
// Gauss weights for the odd-indexed Kronrod abscissae (1, 3, 5) and the centre.
const WG: [f64; 4] =
    [0.129_484_966_168_869_7, 0.279_705_391_489_276_7, 0.381_830_050_505_118_9, 0.417_959_183_673_469_4];

/// One Gauss-Kronrod 7/15 panel: returns (Kronrod estimate, |K15 - G7|).
pub fn gauss_kronrod_15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let s = f(c - dx) + f(c + dx);
        k += WGK[i] * s;
        if i % 2 == 1 {
            g += WG[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

const MAX_DEPTH: u32 = 48;

/// Adaptive bisection with Gauss-Kronrod 7/15 panels to absolute tolerance
/// `tol`. Panels are accepted when `|K15 - G7|` falls below their share of
/// the tolerance.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    let mut total = CompensatedSum::new();
    let mut stack = vec![(a, b, tol, 0u32)];
    while let Some((lo, hi, t, depth)) = stack.pop() {
        let (val, err) = gauss_kronrod_15(&f, lo, hi);
        if !val.is_finite() {
            return Err(Error::QuadratureNonConvergence { a: lo, b: hi, estimate: f64::INFINITY });
        }
        if err <= t || err <= 4.0 * f64::EPSILON * val.abs() {
            total.add(val);
        } else if depth >= MAX_DEPTH {
            return Err(Error::QuadratureNonConvergence { a: lo, b: hi, estimate: err });
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, 0.5 * t, depth + 1));
            stack.push((lo, mid, 0.5 * t, depth + 1));
        }
    }
    Ok(total.value())
}

/// `Gamma(k / 2)` for positive integers `k`, by exact recursion.
pub fn gamma_half(k: u32) -> f64 {
    assert!(k >= 1);
    if k == 1 {
        std::f64::consts::PI.sqrt()
    } else if k == 2 {
        1.0
    } else {
        let x = f64::from(k - 2) / 2.0;
        x * gamma_half(k - 2)
    }
}

/// Surface measure of the unit sphere in `R^n`: `2 pi^{n/2} / Gamma(n/2)`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * std::f64::consts::PI.powf(n as f64 / 2.0) / gamma_half(n as u32)
}

/// Volume of the unit ball in `R^n`.
pub fn ball_volume(n: usize) -> f64 {
    if n == 0 {
        1.0
    } else {
        sphere_area(n) / n as f64
    }
}

/// Gauss rule with `m` nodes for the weight `(1 - t^2)^{(k-1)/2}` on
/// `[-1, 1]`, i.e. the measure induced by `sin^k(theta) d theta` with
/// `t = cos theta`. `k = 1` gives Gauss-Legendre.
///
/// Nodes come from the Jacobi matrix (Golub-Welsch) and are then polished
/// with Newton steps on the orthonormal recurrence; weights are Christoffel
/// numbers from the same recurrence.
pub fn gauss_sine_power(m: usize, k: u32) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1 && k >= 1);
    let a = f64::from(k - 1) / 2.0;
    // mu0 = sqrt(pi) Gamma(a + 1) / Gamma(a + 3/2)
    let mu0 = std::f64::consts::PI.sqrt() * gamma_half(k + 1) / gamma_half(k + 2);
    let beta = |j: usize| -> f64 {
        let j = j as f64;
        (j * (j + 2.0 * a) / ((2.0 * j + 2.0 * a + 1.0) * (2.0 * j + 2.0 * a - 1.0))).sqrt()
    };
    let b: Vec<f64> = (0..=m).map(|j| if j == 0 { 0.0 } else { beta(j) }).collect();

    let mut jac = DMatrix::<f64>::zeros(m, m);
    for j in 1..m {
        jac[(j, j - 1)] = b[j];
        jac[(j - 1, j)] = b[j];
    }
    let eig = SymmetricEigen::new(jac);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());

    // Orthonormal polynomials p_0..p_m and derivative of p_m at t.
    let eval = |t: f64| -> (Vec<f64>, f64) {
        let mut p = vec![0.0; m + 1];
        let mut dp = vec![0.0; m + 1];
        p[0] = 1.0 / mu0.sqrt();
        if m >= 1 {
            p[1] = t * p[0] / b[1];
            dp[1] = p[0] / b[1];
        }
        for j in 1..m {
            p[j + 1] = (t * p[j] - b[j] * p[j - 1]) / b[j + 1];
            dp[j + 1] = (p[j] + t * dp[j] - b[j] * dp[j - 1]) / b[j + 1];
        }
        (p, dp[m])
    };

    let mut weights = Vec::with_capacity(m);
    for x in nodes.iter_mut() {
        for _ in 0..3 {
            let (p, dpm) = eval(*x);
            if dpm != 0.0 {
                *x -= p[m] / dpm;
            }
        }
        let (p, _) = eval(*x);
        let s: f64 = p[..m].iter().map(|v| v * v).sum();
        weights.push(1.0 / s);
    }
    // Enforce exact symmetry of the rule.
    for i in 0..m / 2 {
        let j = m - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}
