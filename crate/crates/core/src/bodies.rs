//! Convex bodies given by support functions, their combinations, and
//! the functionals evaluated on them.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg;
use crate::measures::RadialMeasure;
use crate::quadrature::{ball_volume, sphere_area};
use crate::sphere_core::{curvature_from_jets, node_jets, CurvatureField, SphereGrid, SphericalFunction};

/// Relative eigenvalue floor used when searching the validity radius.
pub const VALIDITY_DELTA: f64 = 0.05;
pub const VALIDITY_STEPS: usize = 40;
pub const VALIDITY_SAMPLES: usize = 17;
pub const DEFAULT_MAX_RADIUS: f64 = 0.5;
const DEGENERATE_PROBE: f64 = 1e-6;

/// A support function validated on a grid: positive, with positive
/// definite curvature matrix at every node.
#[derive(Clone, Debug)]
pub struct Body {
    h: SphericalFunction,
    jets: Arc<Vec<Jet>>,
    curvature: Arc<CurvatureField>,
    symmetric: bool,
    dim: usize,
    resolution: usize,
}

impl Body {
    pub fn support(&self) -> &SphericalFunction {
        &self.h
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Order-2 jets of the 0-homogeneous extension of `h`, one per node.
    pub fn jets(&self) -> &[Jet] {
        &self.jets
    }

    pub fn value(&self, k: usize) -> f64 {
        self.jets[k].value
    }

    pub fn values(&self) -> Vec<f64> {
        self.jets.iter().map(|j| j.value).collect()
    }

    /// `grad_sigma h` at node `k`.
    pub fn gradient(&self, k: usize) -> &[f64] {
        &self.jets[k].grad
    }

    /// `|grad H(u_k)| = sqrt(h^2 + |grad_sigma h|^2)`.
    pub fn radial_distance(&self, k: usize) -> f64 {
        let j = &self.jets[k];
        (j.value * j.value + j.grad.iter().map(|g| g * g).sum::<f64>()).sqrt()
    }

    pub fn curvature(&self) -> &CurvatureField {
        &self.curvature
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.curvature.global_min().1
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub(crate) fn check_grid(&self, grid: &SphereGrid) -> Result<()> {
        if grid.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: grid.dim() });
        }
        if grid.resolution() != self.resolution || grid.len() != self.jets.len() {
            return Err(Error::InvalidGrid("body was validated on a different grid".into()));
        }
        Ok(())
    }
}

pub fn body_from_support(h: &SphericalFunction, grid: &SphereGrid) -> Result<Body> {
    if h.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: h.dim() });
    }
    body_from_jets(h.clone(), node_jets(h, grid, 2), grid)
}

pub(crate) fn body_from_jets(h: SphericalFunction, jets: Vec<Jet>, grid: &SphereGrid) -> Result<Body> {
    for (k, j) in jets.iter().enumerate() {
        if !(j.value > 0.0) {
            return Err(Error::NonPositiveSupport { node: k, value: j.value });
        }
    }
    let curvature = curvature_from_jets(&jets, grid);
    let (node, eigenvalue) = curvature.global_min();
    if !(eigenvalue > 0.0) {
        return Err(Error::NotConvex { node, eigenvalue });
    }
    let symmetric = (0..grid.len()).all(|k| {
        let u = grid.node(k);
        let minus: Vec<f64> = u.iter().map(|x| -x).collect();
        let a = jets[k].value;
        (a - h.value(&minus)).abs() <= 1e-12 * a.abs().max(1.0)
    });
    Ok(Body {
        h,
        jets: Arc::new(jets),
        curvature: Arc::new(curvature),
        symmetric,
        dim: grid.dim(),
        resolution: grid.resolution(),
    })
}

fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("lambda must lie in [0, 1], got {lambda}")));
    }
    Ok(())
}

fn check_pair(k: &Body, l: &Body, grid: &SphereGrid) -> Result<()> {
    k.check_grid(grid)?;
    l.check_grid(grid)
}

/// `lambda K + (1 - lambda) L`.
pub fn minkowski_combine(k: &Body, l: &Body, lambda: f64, grid: &SphereGrid) -> Result<Body> {
    check_pair(k, l, grid)?;
    check_lambda(lambda)?;
    let h = k.h.scale(lambda).add(&l.h.scale(1.0 - lambda));
    let jets = k.jets.iter().zip(l.jets.iter()).map(|(a, b)| a.axpby(lambda, b, 1.0 - lambda)).collect();
    body_from_jets(h, jets, grid)
}

/// Candidate `h_K^lambda h_L^{1-lambda}`, validated as a support function.
pub fn log_combine(k: &Body, l: &Body, lambda: f64, grid: &SphereGrid) -> Result<Body> {
    check_pair(k, l, grid)?;
    check_lambda(lambda)?;
    let h = k.h.ln().scale(lambda).add(&l.h.ln().scale(1.0 - lambda)).exp();
    let jets =
        k.jets.iter().zip(l.jets.iter()).map(|(a, b)| a.ln().axpby(lambda, &b.ln(), 1.0 - lambda).exp()).collect();
    body_from_jets(h, jets, grid)
}

/// `gamma(K) = int h det Q A(D) du` with `D = |grad H|`.
pub fn measure_of_body(measure: &RadialMeasure, body: &Body, grid: &SphereGrid) -> Result<f64> {
    body.check_grid(grid)?;
    let n = grid.dim();
    let vals: Vec<Result<f64>> = grid.map_nodes(|k, _| {
        let a = measure.moment_a(body.radial_distance(k), n)?;
        Ok(body.value(k) * body.curvature.determinant(k) * a)
    });
    let vals = vals.into_iter().collect::<Result<Vec<f64>>>()?;
    Ok(grid.integrate_values(&vals))
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Intrinsic volume of the unit ball: `C(n, j) kappa_n / kappa_{n-j}`.
pub fn ball_intrinsic_volume(n: usize, j: usize) -> f64 {
    let kappa = |d: usize| if d == 0 { 1.0 } else { ball_volume(d) };
    binomial(n, j) * kappa(n) / kappa(n - j)
}

/// `V_0, ..., V_n` from `V_j = c_j int h e_{j-1}(Q) du`, where `c_j` makes
/// the unit ball exact.
pub fn quermassintegrals(body: &Body, grid: &SphereGrid) -> Result<Vec<f64>> {
    body.check_grid(grid)?;
    let n = grid.dim();
    let e: Vec<Vec<f64>> = grid.map_nodes(|k, _| {
        let mut e = linalg::elementary_symmetric(&body.curvature.eigenvalues(k));
        e.iter_mut().for_each(|x| *x *= body.value(k));
        e
    });
    let mut v = vec![1.0];
    for j in 1..=n {
        let vals: Vec<f64> = e.iter().map(|ek| ek[j - 1]).collect();
        let c = ball_intrinsic_volume(n, j) / (binomial(n - 1, j - 1) * sphere_area(n));
        v.push(c * grid.integrate_values(&vals));
    }
    Ok(v)
}

/// `int_{bd K} 1 / <y, nu(y)> dsigma = int det Q / h du`.
pub fn boundary_inverse_height(body: &Body, grid: &SphereGrid) -> Result<f64> {
    body.check_grid(grid)?;
    let vals: Vec<f64> = (0..grid.len()).map(|k| body.curvature.determinant(k) / body.value(k)).collect();
    Ok(grid.integrate_values(&vals))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// `h_s = h + s psi`
    Additive,
    /// `h_s = h phi^s`
    Multiplicative,
}

/// One-parameter family of bodies around a base body, valid for
/// `|s| <= validity_radius()`.
#[derive(Clone, Debug)]
pub struct PerturbationFamily {
    kind: FamilyKind,
    base: Body,
    direction: SphericalFunction,
    // psi jets (additive) or log(phi) jets (multiplicative)
    generator: Arc<Vec<Jet>>,
    validity: f64,
    trace: Vec<(f64, bool)>,
}

impl PerturbationFamily {
    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn base(&self) -> &Body {
        &self.base
    }

    /// `psi` for additive families, `phi` for multiplicative ones.
    pub fn direction(&self) -> &SphericalFunction {
        &self.direction
    }

    pub fn validity_radius(&self) -> f64 {
        self.validity
    }

    /// Bisection trace `(bound, valid)`.
    pub fn trace(&self) -> &[(f64, bool)] {
        &self.trace
    }

    /// The additive direction with the same first-order effect:
    /// `psi` itself, or `h log phi`.
    pub fn additive_direction(&self) -> SphericalFunction {
        match self.kind {
            FamilyKind::Additive => self.direction.clone(),
            FamilyKind::Multiplicative => self.base.h.mul(&self.direction.ln()),
        }
    }

    pub fn support_at(&self, s: f64) -> SphericalFunction {
        match self.kind {
            FamilyKind::Additive => self.base.h.add(&self.direction.scale(s)),
            FamilyKind::Multiplicative => self.base.h.mul(&self.direction.ln().scale(s).exp()),
        }
    }

    fn jets_at(&self, s: f64) -> Vec<Jet> {
        let pairs = self.base.jets.iter().zip(self.generator.iter());
        match self.kind {
            FamilyKind::Additive => pairs.map(|(h, p)| h.axpby(1.0, p, s)).collect(),
            FamilyKind::Multiplicative => pairs.map(|(h, p)| h.mul(&p.scale(s).exp())).collect(),
        }
    }

    /// Body `K_s`; errors outside `[-a, a]`.
    pub fn body_at(&self, s: f64, grid: &SphereGrid) -> Result<Body> {
        if s.abs() > self.validity * (1.0 + 1e-12) {
            return Err(Error::OutsideValidity { s, a: self.validity });
        }
        self.unchecked_body(s, grid)
    }

    pub(crate) fn unchecked_body(&self, s: f64, grid: &SphereGrid) -> Result<Body> {
        self.base.check_grid(grid)?;
        body_from_jets(self.support_at(s), self.jets_at(s), grid)
    }

    fn admissible(&self, bound: f64, grid: &SphereGrid) -> bool {
        let floor = VALIDITY_DELTA * self.base.min_eigenvalue();
        (0..VALIDITY_SAMPLES).all(|i| {
            let s = -bound + 2.0 * bound * i as f64 / (VALIDITY_SAMPLES - 1) as f64;
            let jets = self.jets_at(s);
            if jets.iter().any(|j| !(j.value > 0.0)) {
                return false;
            }
            curvature_from_jets(&jets, grid).global_min().1 >= floor
        })
    }
}

pub fn make_family(
    kind: FamilyKind,
    base: &Body,
    direction: &SphericalFunction,
    grid: &SphereGrid,
) -> Result<PerturbationFamily> {
    make_family_capped(kind, base, direction, grid, DEFAULT_MAX_RADIUS)
}

/// As [`make_family`] with an explicit upper bound on the validity radius.
pub fn make_family_capped(
    kind: FamilyKind,
    base: &Body,
    direction: &SphericalFunction,
    grid: &SphereGrid,
    max_radius: f64,
) -> Result<PerturbationFamily> {
    base.check_grid(grid)?;
    if direction.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: direction.dim() });
    }
    if !(max_radius > 0.0) {
        return Err(Error::InvalidParameter(format!("maximum validity radius must be positive, got {max_radius}")));
    }
    let dir_jets = node_jets(direction, grid, 2);
    let generator = match kind {
        FamilyKind::Additive => dir_jets,
        FamilyKind::Multiplicative => {
            if let Some((k, j)) = dir_jets.iter().enumerate().find(|(_, j)| !(j.value > 0.0)) {
                return Err(Error::InvalidParameter(format!(
                    "multiplicative direction must be positive (phi = {:e} at node {k})",
                    j.value
                )));
            }
            dir_jets.iter().map(Jet::ln).collect()
        }
    };
    let mut fam = PerturbationFamily {
        kind,
        base: base.clone(),
        direction: direction.clone(),
        generator: Arc::new(generator),
        validity: 0.0,
        trace: Vec::new(),
    };
    let mut trace = Vec::new();
    if fam.admissible(max_radius, grid) {
        trace.push((max_radius, true));
        fam.validity = max_radius;
    } else {
        if !fam.admissible(DEGENERATE_PROBE, grid) {
            return Err(Error::DegenerateFamily(DEGENERATE_PROBE));
        }
        let (mut lo, mut hi) = (DEGENERATE_PROBE, max_radius);
        for _ in 0..VALIDITY_STEPS {
            let mid = 0.5 * (lo + hi);
            let ok = fam.admissible(mid, grid);
            trace.push((mid, ok));
            if ok {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        fam.validity = lo;
    }
    fam.trace = trace;
    Ok(fam)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere_core::build_grid;
    use std::f64::consts::PI;

    fn planar(eps: f64, k: u32) -> SphericalFunction {
        SphericalFunction::cos_k(k).scale(eps).offset(1.0)
    }

    #[test]
    fn validation_examples() {
        let g3 = build_grid(3, 16).unwrap();
        let ball = body_from_support(&SphericalFunction::constant(3, 1.0), &g3).unwrap();
        assert!((ball.min_eigenvalue() - 1.0).abs() < 1e-14);
        assert!(ball.is_symmetric());
        let g = build_grid(2, 64).unwrap();
        let b = body_from_support(&planar(0.1, 2), &g).unwrap();
        assert!((b.min_eigenvalue() - 0.7).abs() < 1e-12);
        assert!(matches!(body_from_support(&planar(0.5, 2), &g), Err(Error::NotConvex { node: 0, .. })));
        assert!(matches!(body_from_support(&SphericalFunction::cos_k(1), &g), Err(Error::NonPositiveSupport { .. })));
        assert!(!body_from_support(&planar(0.3, 1), &g).unwrap().is_symmetric());
    }

    #[test]
    fn combinations() {
        let g = build_grid(2, 64).unwrap();
        let k = body_from_support(&planar(0.1, 2), &g).unwrap();
        let l = body_from_support(&planar(0.05, 2), &g).unwrap();
        let m = minkowski_combine(&k, &l, 0.5, &g).unwrap();
        let want = planar(0.075, 2);
        for i in 0..g.len() {
            assert!((m.value(i) - want.value(g.node(i))).abs() < 1e-15);
        }
        let same = log_combine(&k, &k, 0.3, &g).unwrap();
        for i in 0..g.len() {
            assert!((same.value(i) - k.value(i)).abs() < 1e-14);
        }
        let b1 = body_from_support(&SphericalFunction::constant(2, 1.0), &g).unwrap();
        let b2 = body_from_support(&SphericalFunction::constant(2, 4.0), &g).unwrap();
        let lg = log_combine(&b1, &b2, 0.5, &g).unwrap();
        assert!((lg.value(3) - 2.0).abs() < 1e-14);
        assert!(log_combine(&b1, &b2, 1.5, &g).is_err());
    }

    #[test]
    fn measure_examples() {
        let g = build_grid(2, 64).unwrap();
        let leb = RadialMeasure::lebesgue();
        let b = body_from_support(&SphericalFunction::constant(2, 2.0), &g).unwrap();
        assert!((measure_of_body(&leb, &b, &g).unwrap() - 4.0 * PI).abs() < 1e-12);
        let unit = body_from_support(&SphericalFunction::constant(2, 1.0), &g).unwrap();
        let gm = measure_of_body(&RadialMeasure::gaussian(), &unit, &g).unwrap();
        assert!((gm - 2.0 * PI * (1.0 - (-0.5f64).exp())).abs() < 1e-12);
        let shifted = body_from_support(&planar(0.3, 1), &g).unwrap();
        assert!((measure_of_body(&leb, &shifted, &g).unwrap() - PI).abs() < 1e-12);
    }

    #[test]
    fn intrinsic_volumes() {
        let g = build_grid(2, 64).unwrap();
        let disk = body_from_support(&SphericalFunction::constant(2, 1.0), &g).unwrap();
        let v = quermassintegrals(&disk, &g).unwrap();
        assert!((v[2] - PI).abs() < 1e-13 && (v[1] - PI).abs() < 1e-13 && v[0] == 1.0);
        let b = body_from_support(&planar(0.1, 2), &g).unwrap();
        let v = quermassintegrals(&b, &g).unwrap();
        assert!((v[2] - 0.985 * PI).abs() < 1e-12);
        let g3 = build_grid(3, 16).unwrap();
        let ball = body_from_support(&SphericalFunction::constant(3, 1.0), &g3).unwrap();
        let v = quermassintegrals(&ball, &g3).unwrap();
        let want = [1.0, 4.0, 2.0 * PI, 4.0 * PI / 3.0];
        for j in 0..4 {
            assert!((v[j] - want[j]).abs() < 1e-12, "V{j} = {}", v[j]);
        }
    }

    #[test]
    fn inverse_height_examples() {
        let g = build_grid(2, 64).unwrap();
        let disk = body_from_support(&SphericalFunction::constant(2, 1.0), &g).unwrap();
        assert!((boundary_inverse_height(&disk, &g).unwrap() - 2.0 * PI).abs() < 1e-13);
        let g3 = build_grid(3, 16).unwrap();
        let ball = body_from_support(&SphericalFunction::constant(3, 2.0), &g3).unwrap();
        assert!((boundary_inverse_height(&ball, &g3).unwrap() - 8.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn family_radius() {
        let g = build_grid(2, 64).unwrap();
        let unit = body_from_support(&SphericalFunction::constant(2, 1.0), &g).unwrap();
        let f = make_family(FamilyKind::Additive, &unit, &SphericalFunction::constant(2, 1.0), &g).unwrap();
        assert_eq!(f.validity_radius(), DEFAULT_MAX_RADIUS);
        let f = make_family(FamilyKind::Additive, &unit, &SphericalFunction::cos_k(2), &g).unwrap();
        assert!((f.validity_radius() - 0.95 / 3.0).abs() < 1e-9, "{}", f.validity_radius());
        assert!(matches!(f.body_at(0.4, &g), Err(Error::OutsideValidity { .. })));
        let phi = SphericalFunction::cos_k(2).exp();
        let f = make_family(FamilyKind::Multiplicative, &unit, &phi, &g).unwrap();
        assert!(f.validity_radius() > 0.0 && !f.trace().is_empty());
        let bad = make_family(FamilyKind::Multiplicative, &unit, &SphericalFunction::cos_k(1), &g);
        assert!(bad.is_err());
    }
}
