//! Truncated multivariate Taylor jets (value, gradient, Hessian, third
//! derivative tensor) with forward-mode arithmetic.
//!
//! Jets carry derivatives of ambient functions on `R^n`. They are how
//! spherical functions get exact derivatives: a function on the sphere is
//! evaluated through its homogeneous extension, and every derivative the
//! geometry needs (spherical gradient, curvature matrix, divergence of the
//! cofactor field) is read off these tensors.

/// Derivatives of a scalar function of `n` variables at one point, up to
/// `order` (0..=3). Tensors above `order` are left empty.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    dim: usize,
    order: u8,
    pub value: f64,
    pub grad: Vec<f64>,
    pub hess: Vec<f64>,
    pub third: Vec<f64>,
}

impl Jet {
    pub fn constant(dim: usize, order: u8, c: f64) -> Self {
        assert!(order <= 3, "jets are truncated at order 3");
        let n = dim;
        Self {
            dim,
            order,
            value: c,
            grad: if order >= 1 { vec![0.0; n] } else { Vec::new() },
            hess: if order >= 2 { vec![0.0; n * n] } else { Vec::new() },
            third: if order >= 3 { vec![0.0; n * n * n] } else { Vec::new() },
        }
    }

    /// The coordinate function `x_i` expanded at `x0`.
    pub fn variable(x0: &[f64], order: u8, i: usize) -> Self {
        let mut j = Self::constant(x0.len(), order, x0[i]);
        if order >= 1 {
            j.grad[i] = 1.0;
        }
        j
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn order(&self) -> u8 {
        self.order
    }

    #[inline]
    pub fn h(&self, a: usize, b: usize) -> f64 {
        self.hess[a * self.dim + b]
    }

    #[inline]
    pub fn t(&self, a: usize, b: usize, c: usize) -> f64 {
        self.third[(a * self.dim + b) * self.dim + c]
    }

    fn check(&self, other: &Self) {
        debug_assert_eq!(self.dim, other.dim);
        debug_assert_eq!(self.order, other.order);
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpby(1.0, other, 1.0)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpby(1.0, other, -1.0)
    }

    /// `a * self + b * other`, tensor by tensor.
    pub fn axpby(&self, a: f64, other: &Self, b: f64) -> Self {
        self.check(other);
        let lin = |x: &[f64], y: &[f64]| x.iter().zip(y).map(|(p, q)| a * p + b * q).collect();
        Self {
            dim: self.dim,
            order: self.order,
            value: a * self.value + b * other.value,
            grad: lin(&self.grad, &other.grad),
            hess: lin(&self.hess, &other.hess),
            third: lin(&self.third, &other.third),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        let s = |x: &[f64]| x.iter().map(|v| c * v).collect();
        Self {
            dim: self.dim,
            order: self.order,
            value: c * self.value,
            grad: s(&self.grad),
            hess: s(&self.hess),
            third: s(&self.third),
        }
    }

    pub fn add_scalar(&self, c: f64) -> Self {
        let mut out = self.clone();
        out.value += c;
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        let n = self.dim;
        let (f, g) = (self, other);
        let mut out = Self::constant(n, self.order, f.value * g.value);
        if self.order >= 1 {
            for a in 0..n {
                out.grad[a] = f.grad[a] * g.value + f.value * g.grad[a];
            }
        }
        if self.order >= 2 {
            for a in 0..n {
                for b in 0..n {
                    out.hess[a * n + b] =
                        f.h(a, b) * g.value + f.grad[a] * g.grad[b] + f.grad[b] * g.grad[a] + f.value * g.h(a, b);
                }
            }
        }
        if self.order >= 3 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        out.third[(a * n + b) * n + c] = f.t(a, b, c) * g.value
                            + f.h(a, b) * g.grad[c]
                            + f.h(a, c) * g.grad[b]
                            + f.h(b, c) * g.grad[a]
                            + f.grad[a] * g.h(b, c)
                            + f.grad[b] * g.h(a, c)
                            + f.grad[c] * g.h(a, b)
                            + f.value * g.t(a, b, c);
                    }
                }
            }
        }
        out
    }

    /// Chain rule for `phi(self)` given `phi` and its first three derivatives
    /// evaluated at `self.value`.
    pub fn compose(&self, d: [f64; 4]) -> Self {
        let n = self.dim;
        let f = self;
        let mut out = Self::constant(n, self.order, d[0]);
        if self.order >= 1 {
            for a in 0..n {
                out.grad[a] = d[1] * f.grad[a];
            }
        }
        if self.order >= 2 {
            for a in 0..n {
                for b in 0..n {
                    out.hess[a * n + b] = d[2] * f.grad[a] * f.grad[b] + d[1] * f.h(a, b);
                }
            }
        }
        if self.order >= 3 {
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        out.third[(a * n + b) * n + c] = d[3] * f.grad[a] * f.grad[b] * f.grad[c]
                            + d[2] * (f.h(a, b) * f.grad[c] + f.h(a, c) * f.grad[b] + f.h(b, c) * f.grad[a])
                            + d[1] * f.t(a, b, c);
                    }
                }
            }
        }
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.compose([e, e, e, e])
    }

    pub fn ln(&self) -> Self {
        let x = self.value;
        self.compose([x.ln(), 1.0 / x, -1.0 / (x * x), 2.0 / (x * x * x)])
    }

    pub fn powf(&self, p: f64) -> Self {
        let x = self.value;
        self.compose([
            x.powf(p),
            p * x.powf(p - 1.0),
            p * (p - 1.0) * x.powf(p - 2.0),
            p * (p - 1.0) * (p - 2.0) * x.powf(p - 3.0),
        ])
    }

    pub fn sqrt(&self) -> Self {
        self.powf(0.5)
    }

    pub fn recip(&self) -> Self {
        let x = self.value;
        let r = 1.0 / x;
        self.compose([r, -r * r, 2.0 * r * r * r, -6.0 * r * r * r * r])
    }

    /// Lower the truncation order, dropping the higher tensors.
    pub fn truncate(&self, order: u8) -> Self {
        let mut out = self.clone();
        if order < self.order {
            out.order = order;
            if order < 3 {
                out.third.clear();
            }
            if order < 2 {
                out.hess.clear();
            }
            if order < 1 {
                out.grad.clear();
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_grad(f: &dyn Fn(&[f64]) -> f64, x: &[f64], i: usize) -> f64 {
        let h = 1e-6;
        let mut p = x.to_vec();
        let mut m = x.to_vec();
        p[i] += h;
        m[i] -= h;
        (f(&p) - f(&m)) / (2.0 * h)
    }

    #[test]
    fn product_and_composition_match_finite_differences() {
        let x0 = [0.3, -0.7, 0.5];
        let f = |x: &[f64]| (x[0] * x[1] + x[2] * x[2]).exp() * (1.0 + x[0] * x[0]).ln();
        let vars: Vec<Jet> = (0..3).map(|i| Jet::variable(&x0, 3, i)).collect();
        let inner = vars[0].mul(&vars[1]).add(&vars[2].mul(&vars[2])).exp();
        let outer = vars[0].mul(&vars[0]).add_scalar(1.0).ln();
        let j = inner.mul(&outer);
        assert!((j.value - f(&x0)).abs() < 1e-14);
        for i in 0..3 {
            assert!((j.grad[i] - fd_grad(&f, &x0, i)).abs() < 1e-8);
        }
        // Hessian entries from finite differences of the analytic gradient.
        for a in 0..3 {
            let g = |x: &[f64]| {
                let v: Vec<Jet> = (0..3).map(|i| Jet::variable(x, 1, i)).collect();
                let inner = v[0].mul(&v[1]).add(&v[2].mul(&v[2])).exp();
                let outer = v[0].mul(&v[0]).add_scalar(1.0).ln();
                inner.mul(&outer).grad[a]
            };
            for b in 0..3 {
                assert!((j.h(a, b) - fd_grad(&g, &x0, b)).abs() < 1e-7);
            }
        }
        for a in 0..3 {
            for b in 0..3 {
                let hfun = |x: &[f64]| {
                    let v: Vec<Jet> = (0..3).map(|i| Jet::variable(x, 2, i)).collect();
                    let inner = v[0].mul(&v[1]).add(&v[2].mul(&v[2])).exp();
                    let outer = v[0].mul(&v[0]).add_scalar(1.0).ln();
                    inner.mul(&outer).h(a, b)
                };
                for c in 0..3 {
                    assert!((j.t(a, b, c) - fd_grad(&hfun, &x0, c)).abs() < 1e-6);
                }
            }
        }
    }

    #[test]
    fn powers_and_reciprocal() {
        let x0 = [1.7];
        let x = Jet::variable(&x0, 3, 0);
        let r = x.recip();
        assert!((r.t(0, 0, 0) + 6.0 / 1.7f64.powi(4)).abs() < 1e-12);
        let s = x.sqrt().mul(&x.sqrt());
        assert!((s.value - 1.7).abs() < 1e-14);
        assert!((s.grad[0] - 1.0).abs() < 1e-14);
        assert!(s.h(0, 0).abs() < 1e-14);
        assert!(s.t(0, 0, 0).abs() < 1e-13);
    }
}
