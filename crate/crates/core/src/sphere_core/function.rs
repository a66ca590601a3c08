use std::fmt;
use std::sync::Arc;

use crate::jet::Jet;
use crate::polynomial::{Parity, Polynomial};

/// A black-box evaluator on the sphere.
pub type Evaluator = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Relative step of the central-difference fallback used for black boxes.
pub const FD_STEP: f64 = 1e-5;

#[derive(Clone)]
enum Expr {
    Poly(Polynomial),
    Add(Arc<Expr>, Arc<Expr>),
    Mul(Arc<Expr>, Arc<Expr>),
    Scale(f64, Arc<Expr>),
    Exp(Arc<Expr>),
    Ln(Arc<Expr>),
    Powf(Arc<Expr>, f64),
    LaplaceBeltrami(Arc<Expr>),
    BlackBox(Evaluator),
}

/// Smooth scalar field on `S^{n-1}`.
///
/// The canonical representation is an ambient polynomial restricted to the
/// sphere, closed under sums, products, `exp`, `ln` and real powers. All
/// derivatives are taken analytically through the homogeneous extensions:
/// the 0-homogeneous extension `x -> psi(x/|x|)` gives the spherical
/// gradient and covariant Hessian, the 1-homogeneous one `|x| psi(x/|x|)`
/// gives the curvature matrix.
///
/// Black-box evaluators are accepted too; their derivatives come from central
/// differences with step `1e-5 max(1, |x|)`, so they lose roughly half the
/// significant digits in Hessians and have no third derivatives.
#[derive(Clone)]
pub struct SphericalFunction {
    dim: usize,
    expr: Arc<Expr>,
    parity: Parity,
}

/// Jets of the coordinates of `x / |x|` and of `|x|` at a unit vector.
pub(crate) struct PointJets {
    pub vars: Vec<Jet>,
    pub radius: Jet,
}

impl PointJets {
    pub fn new(u: &[f64], order: u8) -> Self {
        let n = u.len();
        let x: Vec<Jet> = (0..n).map(|i| Jet::variable(u, order, i)).collect();
        let mut r2 = Jet::constant(n, order, 0.0);
        for xi in &x {
            r2 = r2.add(&xi.mul(xi));
        }
        let radius = r2.sqrt();
        let inv = radius.recip();
        let vars = x.iter().map(|xi| xi.mul(&inv)).collect();
        Self { vars, radius }
    }
}

impl SphericalFunction {
    fn from_expr(dim: usize, expr: Expr, parity: Parity) -> Self {
        Self { dim, expr: Arc::new(expr), parity }
    }

    pub fn polynomial(p: Polynomial) -> Self {
        let parity = p.parity();
        Self::from_expr(p.dim(), Expr::Poly(p), parity)
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::polynomial(Polynomial::constant(dim, c))
    }

    /// The restriction of the coordinate `x_i` (a first spherical harmonic).
    pub fn coordinate(dim: usize, i: usize) -> Self {
        Self::polynomial(Polynomial::coordinate(dim, i))
    }

    /// `cos(k theta)` on the circle.
    pub fn cos_k(k: u32) -> Self {
        Self::polynomial(Polynomial::cos_k(k))
    }

    /// `sin(k theta)` on the circle.
    pub fn sin_k(k: u32) -> Self {
        Self::polynomial(Polynomial::sin_k(k))
    }

    /// Wrap an arbitrary evaluator. Parity is unknown unless declared.
    pub fn from_fn<F>(dim: usize, f: F, parity: Option<Parity>) -> Self
    where
        F: Fn(&[f64]) -> f64 + Send + Sync + 'static,
    {
        Self::from_expr(dim, Expr::BlackBox(Arc::new(f)), parity.unwrap_or(Parity::Neither))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn as_polynomial(&self) -> Option<&Polynomial> {
        match self.expr.as_ref() {
            Expr::Poly(p) => Some(p),
            _ => None,
        }
    }

    /// True when some derivative of this function is obtained by finite
    /// differences rather than analytically.
    pub fn uses_finite_differences(&self) -> bool {
        fn walk(e: &Expr) -> bool {
            match e {
                Expr::Poly(_) => false,
                Expr::Add(a, b) | Expr::Mul(a, b) => walk(a) || walk(b),
                Expr::Scale(_, a) | Expr::Exp(a) | Expr::Ln(a) | Expr::Powf(a, _) => walk(a),
                Expr::LaplaceBeltrami(_) | Expr::BlackBox(_) => true,
            }
        }
        walk(&self.expr)
    }

    fn assert_dim(&self, other: &Self) {
        assert_eq!(self.dim, other.dim, "spherical functions live on different spheres");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_dim(other);
        let parity = self.parity.sum(other.parity);
        if let (Expr::Poly(p), Expr::Poly(q)) = (self.expr.as_ref(), other.expr.as_ref()) {
            return Self::polynomial(p.add(q));
        }
        Self::from_expr(self.dim, Expr::Add(self.expr.clone(), other.expr.clone()), parity)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-1.0))
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_dim(other);
        let parity = self.parity.product(other.parity);
        if let (Expr::Poly(p), Expr::Poly(q)) = (self.expr.as_ref(), other.expr.as_ref()) {
            return Self::polynomial(p.mul(q));
        }
        Self::from_expr(self.dim, Expr::Mul(self.expr.clone(), other.expr.clone()), parity)
    }

    pub fn scale(&self, c: f64) -> Self {
        if let Expr::Poly(p) = self.expr.as_ref() {
            return Self::polynomial(p.scale(c));
        }
        let parity = if c == 0.0 { Parity::Even } else { self.parity };
        Self::from_expr(self.dim, Expr::Scale(c, self.expr.clone()), parity)
    }

    pub fn offset(&self, c: f64) -> Self {
        self.add(&Self::constant(self.dim, c))
    }

    fn unary_parity(&self) -> Parity {
        // exp, ln and powers preserve evenness only
        if self.parity == Parity::Even {
            Parity::Even
        } else {
            Parity::Neither
        }
    }

    pub fn exp(&self) -> Self {
        Self::from_expr(self.dim, Expr::Exp(self.expr.clone()), self.unary_parity())
    }

    pub fn ln(&self) -> Self {
        Self::from_expr(self.dim, Expr::Ln(self.expr.clone()), self.unary_parity())
    }

    pub fn powf(&self, p: f64) -> Self {
        if p == 1.0 {
            return self.clone();
        }
        if p == 0.0 {
            return Self::constant(self.dim, 1.0);
        }
        Self::from_expr(self.dim, Expr::Powf(self.expr.clone(), p), self.unary_parity())
    }

    /// Laplace-Beltrami image. Polynomials map to polynomials exactly; other
    /// expressions are wrapped and evaluated pointwise from their Hessian.
    pub fn laplace_beltrami(&self) -> Self {
        match self.expr.as_ref() {
            Expr::Poly(p) => Self::polynomial(p.laplace_beltrami()),
            _ => Self::from_expr(self.dim, Expr::LaplaceBeltrami(self.expr.clone()), self.parity),
        }
    }

    pub fn value(&self, u: &[f64]) -> f64 {
        debug_assert_eq!(u.len(), self.dim);
        self.expr.value(u)
    }

    /// Jet of the 0-homogeneous extension `x -> psi(x/|x|)` at the unit
    /// vector `u`.
    pub fn jet(&self, u: &[f64], order: u8) -> Jet {
        let ctx = PointJets::new(u, order);
        self.expr.jet(u, &ctx)
    }

    /// Jet of the 1-homogeneous extension `x -> |x| psi(x/|x|)` at `u`.
    pub fn extension_jet(&self, u: &[f64], order: u8) -> Jet {
        let ctx = PointJets::new(u, order);
        ctx.radius.mul(&self.expr.jet(u, &ctx))
    }

    /// Spherical gradient `grad Phi(u) - psi(u) u`, as an ambient vector
    /// orthogonal to `u`.
    pub fn spherical_gradient(&self, u: &[f64]) -> Vec<f64> {
        let j = self.extension_jet(u, 1);
        let mut g: Vec<f64> = j.grad.iter().zip(u).map(|(d, ui)| d - j.value * ui).collect();
        project_tangent(&mut g, u);
        g
    }
}

/// Remove the component of `v` along the unit vector `u`.
pub(crate) fn project_tangent(v: &mut [f64], u: &[f64]) {
    let d: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
    for (vi, ui) in v.iter_mut().zip(u) {
        *vi -= d * ui;
    }
}

impl Expr {
    fn value(&self, u: &[f64]) -> f64 {
        match self {
            Expr::Poly(p) => p.eval(u),
            Expr::Add(a, b) => a.value(u) + b.value(u),
            Expr::Mul(a, b) => a.value(u) * b.value(u),
            Expr::Scale(c, a) => c * a.value(u),
            Expr::Exp(a) => a.value(u).exp(),
            Expr::Ln(a) => a.value(u).ln(),
            Expr::Powf(a, p) => a.value(u).powf(*p),
            Expr::LaplaceBeltrami(a) => {
                let ctx = PointJets::new(u, 2);
                let j = a.jet(u, &ctx);
                let n = u.len();
                (0..n).map(|i| j.h(i, i)).sum()
            }
            Expr::BlackBox(f) => f(u),
        }
    }

    fn jet(&self, u: &[f64], ctx: &PointJets) -> Jet {
        match self {
            Expr::Poly(p) => p.eval_jet(&ctx.vars),
            Expr::Add(a, b) => a.jet(u, ctx).add(&b.jet(u, ctx)),
            Expr::Mul(a, b) => a.jet(u, ctx).mul(&b.jet(u, ctx)),
            Expr::Scale(c, a) => a.jet(u, ctx).scale(*c),
            Expr::Exp(a) => a.jet(u, ctx).exp(),
            Expr::Ln(a) => a.jet(u, ctx).ln(),
            Expr::Powf(a, p) => a.jet(u, ctx).powf(*p),
            Expr::LaplaceBeltrami(_) | Expr::BlackBox(_) => {
                finite_difference_jet(&|x: &[f64]| self.value(x), u, ctx.vars[0].order())
            }
        }
    }
}

/// Derivatives of the 0-homogeneous extension of a pointwise evaluator by
/// central differences. Third derivatives are not provided (left zero).
fn finite_difference_jet(f: &dyn Fn(&[f64]) -> f64, u: &[f64], order: u8) -> Jet {
    let n = u.len();
    let ext = |x: &[f64]| {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let y: Vec<f64> = x.iter().map(|v| v / r).collect();
        f(&y)
    };
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    let h = FD_STEP * norm.max(1.0);
    let f0 = ext(u);
    let mut jet = Jet::constant(n, order, f0);
    let shifted = |d: &[(usize, f64)]| {
        let mut x = u.to_vec();
        for &(i, s) in d {
            x[i] += s;
        }
        ext(&x)
    };
    if order >= 1 {
        for a in 0..n {
            jet.grad[a] = (shifted(&[(a, h)]) - shifted(&[(a, -h)])) / (2.0 * h);
        }
    }
    if order >= 2 {
        for a in 0..n {
            for b in a..n {
                let v = if a == b {
                    (shifted(&[(a, h)]) - 2.0 * f0 + shifted(&[(a, -h)])) / (h * h)
                } else {
                    (shifted(&[(a, h), (b, h)]) - shifted(&[(a, h), (b, -h)]) - shifted(&[(a, -h), (b, h)])
                        + shifted(&[(a, -h), (b, -h)]))
                        / (4.0 * h * h)
                };
                jet.hess[a * n + b] = v;
                jet.hess[b * n + a] = v;
            }
        }
    }
    jet
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Poly(p) => write!(f, "({p})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Mul(a, b) => write!(f, "{a}*{b}"),
            Expr::Scale(c, a) => write!(f, "{c}*{a}"),
            Expr::Exp(a) => write!(f, "exp{a}"),
            Expr::Ln(a) => write!(f, "ln{a}"),
            Expr::Powf(a, p) => write!(f, "{a}^{p}"),
            Expr::LaplaceBeltrami(a) => write!(f, "lb{a}"),
            Expr::BlackBox(_) => write!(f, "<black box>"),
        }
    }
}

impl fmt::Display for SphericalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.expr)
    }
}

impl fmt::Debug for SphericalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SphericalFunction(n={}, {:?}, {})", self.dim, self.parity, self.expr)
    }
}
