use std::f64::consts::PI;

use bm_stability::bodies::{
    body_from_support, log_combine, make_family, measure_of_body, minkowski_combine, quermassintegrals, FamilyKind,
};
use bm_stability::inequalities::{check_b1_b2, check_logbm_ball_form, scan_dim_bm, second_harmonic};
use bm_stability::measures::{moments, RadialMeasure, MOMENT_TOL};
use bm_stability::oracles::{finite_diff, finite_diff_richardson, wulff_polygon_from_fn};
use bm_stability::polynomial::Polynomial;
use bm_stability::quadrature::gamma_half;
use bm_stability::sphere_core::{
    build_grid, curvature_matrix, gradient_energy, integrate, laplace_beltrami, poincare_ratio, sample, split_mean,
    tangent_curvature, SphereGrid, SphericalFunction,
};
use proptest::prelude::*;

fn grid(n: usize, res: usize) -> SphereGrid {
    build_grid(n, res).unwrap()
}

/// `int_S x^a = 2 prod Gamma((a_i+1)/2) / Gamma((|a|+n)/2)` for even `a`.
fn monomial_integral(powers: &[u32]) -> f64 {
    if powers.iter().any(|p| p % 2 == 1) {
        return 0.0;
    }
    let total: u32 = powers.iter().sum::<u32>() + powers.len() as u32;
    2.0 * powers.iter().map(|&p| gamma_half(p + 1)).product::<f64>() / gamma_half(total)
}

fn poly_from(n: usize, coeffs: &[f64], degree: u32) -> SphericalFunction {
    let mut p = Polynomial::zero(n);
    let mut it = coeffs.iter().cycle();
    for d in 0..=degree {
        for pw in monomials(n, d) {
            p.add_term(pw, *it.next().unwrap());
        }
    }
    SphericalFunction::polynomial(p)
}

fn even_poly_from(n: usize, coeffs: &[f64]) -> SphericalFunction {
    let mut p = Polynomial::zero(n);
    let mut it = coeffs.iter().cycle();
    for d in [2u32, 4] {
        for pw in monomials(n, d) {
            p.add_term(pw, *it.next().unwrap());
        }
    }
    SphericalFunction::polynomial(p)
}

fn monomials(n: usize, degree: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![degree]];
    }
    let mut out = Vec::new();
    for d in 0..=degree {
        for mut rest in monomials(n - 1, degree - d) {
            rest.insert(0, d);
            out.push(rest);
        }
    }
    out
}

fn unit(v: &[f64]) -> Vec<f64> {
    let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / r).collect()
}

/// Orthonormal basis of the complement of `u`, from a random start.
fn random_frame(u: &[f64], seeds: &[f64]) -> Vec<f64> {
    let n = u.len();
    let mut basis: Vec<Vec<f64>> = vec![u.to_vec()];
    let mut k = 0;
    while basis.len() < n {
        let mut v: Vec<f64> = (0..n).map(|i| seeds[(k * n + i) % seeds.len()] + 0.1 * (k + i) as f64).collect();
        k += 1;
        for b in &basis {
            let d: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
        }
        let r = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if r > 1e-6 {
            basis.push(v.iter().map(|x| x / r).collect());
        }
    }
    basis[1..].concat()
}

fn sorted_eigs(m: usize, q: &[f64]) -> Vec<f64> {
    bm_stability::linalg::sym_eigenvalues(m, q)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn quadrature_is_exact_to_its_degree(n in 2usize..5, res in 6usize..20, raw in prop::collection::vec(0u32..6, 4)) {
        let g = grid(n, res);
        let mut powers: Vec<u32> = raw[..n].to_vec();
        while powers.iter().sum::<u32>() as usize > g.exactness_degree() {
            let i = powers.iter().position(|&p| p > 0).unwrap();
            powers[i] -= 1;
        }
        let f = SphericalFunction::polynomial(Polynomial::monomial(n, powers.clone(), 1.0));
        let got = integrate(&f, &g).unwrap();
        prop_assert!((got - monomial_integral(&powers)).abs() < 1e-10, "{powers:?}: {got}");
    }

    #[test]
    fn curvature_is_frame_independent(n in 2usize..5, c in prop::collection::vec(-0.1f64..0.1, 12), x in prop::collection::vec(-1.0f64..1.0, 8)) {
        let h = poly_from(n, &c, 2).offset(1.0);
        let u = unit(&x[..n]);
        if u.iter().any(|v| !v.is_finite()) {
            return Ok(());
        }
        let jet = h.jet(&u, 2);
        let a = tangent_curvature(&jet, &random_frame(&u, &x));
        let b = tangent_curvature(&jet, &random_frame(&u, &c));
        let m = n - 1;
        let (ea, eb) = (sorted_eigs(m, &a), sorted_eigs(m, &b));
        for (p, q) in ea.iter().zip(&eb) {
            prop_assert!((p - q).abs() < 1e-10);
        }
    }

    #[test]
    fn extension_gradient_splits(n in 2usize..5, c in prop::collection::vec(-1.0f64..1.0, 12), x in prop::collection::vec(-1.0f64..1.0, 4)) {
        // grad of |x| psi(x/|x|) at u is psi(u) u + grad_sigma psi(u)
        let psi = poly_from(n, &c, 3);
        let u = unit(&x[..n]);
        if u.iter().any(|v| !v.is_finite()) {
            return Ok(());
        }
        let ext = psi.extension_jet(&u, 1);
        let sg = psi.spherical_gradient(&u);
        let val = psi.value(&u);
        for i in 0..n {
            prop_assert!((ext.grad[i] - (val * u[i] + sg[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn divergence_theorem(n in 2usize..5, c in prop::collection::vec(-1.0f64..1.0, 10)) {
        let g = grid(n, 16);
        let psi = poly_from(n, &c, 3);
        let lap = laplace_beltrami(&psi, &g).unwrap();
        prop_assert!(integrate(&lap, &g).unwrap().abs() < 1e-9);
        let lhs = integrate(&psi.mul(&lap), &g).unwrap();
        prop_assert!((lhs + gradient_energy(&psi, &g).unwrap()).abs() < 1e-9);
    }

    #[test]
    fn poincare_bounds(n in 2usize..5, c in prop::collection::vec(-1.0f64..1.0, 20)) {
        let g = grid(n, 16);
        let (_, any) = split_mean(&poly_from(n, &c, 3), &g).unwrap();
        if let Ok(r) = poincare_ratio(&any, &g) {
            prop_assert!(r >= n as f64 - 1.0 - 1e-8);
        }
        let (_, even) = split_mean(&even_poly_from(n, &c), &g).unwrap();
        if let Ok(r) = poincare_ratio(&even, &g) {
            prop_assert!(r >= 2.0 * n as f64 - 1e-8);
        }
    }

    #[test]
    fn moment_monotonicity(n in 2usize..5, d in 0.01f64..5.0, step in 0.01f64..1.0, p in 1.0f64..4.0) {
        for m in [RadialMeasure::gaussian(), RadialMeasure::exp_power(p).unwrap(), RadialMeasure::lebesgue()] {
            let a = moments(&m, d, n).unwrap();
            let b = moments(&m, d + step, n).unwrap();
            prop_assert!(b.a <= a.a + 1e-15);
            prop_assert!(a.b <= 0.0);
            // n A + D B = f(D)
            prop_assert!(n as f64 * a.a + d * a.b >= -MOMENT_TOL * n as f64 * a.a);
        }
    }

    #[test]
    fn combinations_are_pointwise(c1 in prop::collection::vec(-0.08f64..0.08, 6), c2 in prop::collection::vec(-0.08f64..0.08, 6), l in 0.0f64..1.0) {
        let g = grid(2, 32);
        let k = body_from_support(&poly_from(2, &c1, 2).offset(1.0), &g).unwrap();
        let m = body_from_support(&poly_from(2, &c2, 2).offset(1.3), &g).unwrap();
        let sum = minkowski_combine(&k, &m, l, &g).unwrap();
        let geo = log_combine(&k, &m, l, &g).unwrap();
        for i in 0..g.len() {
            prop_assert_eq!(sum.value(i), l * k.value(i) + (1.0 - l) * m.value(i));
            // AM-GM, up to the rounding of exp(ln)
            prop_assert!(geo.value(i) <= sum.value(i) * (1.0 + 4.0 * f64::EPSILON));
        }
    }

    #[test]
    fn nested_balls_are_ordered(n in 2usize..4, r in 0.1f64..3.0, dr in 0.001f64..1.0) {
        let g = grid(n, 16);
        let leb = RadialMeasure::lebesgue();
        let small = measure_of_body(&leb, &body_from_support(&SphericalFunction::constant(n, r), &g).unwrap(), &g).unwrap();
        let big = measure_of_body(&leb, &body_from_support(&SphericalFunction::constant(n, r + dr), &g).unwrap(), &g).unwrap();
        prop_assert!(small > 0.0 && big > small);
    }

    #[test]
    fn minkowski_second_inequality(n in 2usize..4, c in prop::collection::vec(-0.08f64..0.08, 10)) {
        let g = grid(n, 24);
        let body = body_from_support(&even_poly_from(n, &c).offset(1.0), &g).unwrap();
        let v = quermassintegrals(&body, &g).unwrap();
        prop_assert!(v[n] * v[n - 2] <= (n as f64 - 1.0) / n as f64 * v[n - 1] * v[n - 1]);
    }

    #[test]
    fn polygon_matches_quadrature(c in prop::collection::vec(-0.08f64..0.08, 6)) {
        let g = grid(2, 128);
        let h = poly_from(2, &c, 2).offset(1.0);
        let body = body_from_support(&h, &g).unwrap();
        let area = measure_of_body(&RadialMeasure::lebesgue(), &body, &g).unwrap();
        let poly = wulff_polygon_from_fn(|t| h.value(&[t.cos(), t.sin()]), 720).unwrap();
        prop_assert!((poly.area() - area).abs() < 1e-4);
    }

    #[test]
    fn richardson_order(a in 0.5f64..2.0, s in -1.0f64..1.0) {
        let f = |x: f64| (a * x).sin();
        let exact = a * (a * s).cos();
        let e1 = (finite_diff(f, s, 1, 0.1).unwrap() - exact).abs();
        let e2 = (finite_diff(f, s, 1, 0.05).unwrap() - exact).abs();
        if e1 > 1e-9 {
            prop_assert!((e1 / e2 - 4.0).abs() < 0.2);
            let r = (finite_diff_richardson(f, s, 1, 0.1).unwrap() - exact).abs();
            prop_assert!(r < e2 * 0.1);
        }
    }

    #[test]
    fn zero_mean_b1_b2_decomposition(c in prop::collection::vec(-1.0f64..1.0, 12), r in 0.5f64..2.0) {
        let g = grid(2, 32);
        let (_, psi) = split_mean(&poly_from(2, &c, 3), &g).unwrap();
        for m in [RadialMeasure::gaussian(), RadialMeasure::exp_power(1.0).unwrap(), RadialMeasure::lebesgue()] {
            let rep = check_b1_b2(r, &psi, &m, &g).unwrap();
            prop_assert!(rep.details["b1_zero_mean_part"] <= 1e-12);
            prop_assert!(rep.margin >= -1e-12);
        }
    }

    #[test]
    fn even_zero_mean_logbm_chain(c in prop::collection::vec(-1.0f64..1.0, 8), r in 0.5f64..2.0) {
        let g = grid(2, 32);
        let (_, psi) = split_mean(&even_poly_from(2, &c), &g).unwrap();
        for m in [RadialMeasure::gaussian(), RadialMeasure::exp_power(1.0).unwrap(), RadialMeasure::lebesgue()] {
            let rep = check_logbm_ball_form(r, &psi, &m, &g).unwrap();
            prop_assert_eq!(rep.details["case1_chain"], 1.0);
            prop_assert!(rep.margin >= -1e-12);
        }
    }
}

#[test]
fn gauss_curvature_of_the_boundary_curve() {
    // boundary x(t) = h u + h' u_perp has curvature 1 / (h + h'')
    let g = grid(2, 64);
    let h = SphericalFunction::cos_k(2).scale(0.1).add(&SphericalFunction::sin_k(3).scale(0.02)).offset(1.0);
    let q = curvature_matrix(&h, &g).unwrap();
    let ht = |t: f64| h.value(&[t.cos(), t.sin()]);
    let point = |t: f64| {
        let d = (ht(t + 1e-5) - ht(t - 1e-5)) / 2e-5;
        [ht(t) * t.cos() - d * t.sin(), ht(t) * t.sin() + d * t.cos()]
    };
    for k in 0..g.len() {
        let u = g.node(k);
        let t = u[1].atan2(u[0]);
        let e = 1e-3;
        let (a, b, c) = (point(t - e), point(t), point(t + e));
        let d1 = [(c[0] - a[0]) / (2.0 * e), (c[1] - a[1]) / (2.0 * e)];
        let d2 = [(c[0] - 2.0 * b[0] + a[0]) / (e * e), (c[1] - 2.0 * b[1] + a[1]) / (e * e)];
        let speed = (d1[0] * d1[0] + d1[1] * d1[1]).sqrt();
        let kappa = (d1[0] * d2[1] - d1[1] * d2[0]) / speed.powi(3);
        assert!((q.determinant(k) * kappa - 1.0).abs() < 1e-4, "node {k}: {}", q.determinant(k) * kappa);
    }
}

#[test]
fn reports_are_reproducible_and_continuous() {
    let g = grid(2, 48);
    let m = RadialMeasure::gaussian();
    let psi = second_harmonic(2).scale(0.3).offset(1.0);
    let a = scan_dim_bm(&m, 1.0, &psi, 0.05, 20, &g).unwrap();
    let b = scan_dim_bm(&m, 1.0, &psi, 0.05, 20, &g).unwrap();
    assert_eq!(a, b);
    for chunk in a.chunks(21) {
        let ms: Vec<f64> = chunk.iter().map(|r| r.margin).collect();
        let jumps: Vec<f64> = ms.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        for i in 1..jumps.len() - 1 {
            let local = jumps[i - 1].max(jumps[i + 1]);
            assert!(jumps[i] <= 10.0 * local + 1e-14, "{ms:?}");
        }
    }
}

#[test]
fn homogeneous_ball_family_matches_closed_form() {
    let g = grid(3, 24);
    let base = body_from_support(&SphericalFunction::constant(3, 1.0), &g).unwrap();
    let fam = make_family(FamilyKind::Additive, &base, &SphericalFunction::constant(3, 1.0), &g).unwrap();
    for s in [-0.2, 0.0, 0.3] {
        let v = measure_of_body(&RadialMeasure::lebesgue(), &fam.body_at(s, &g).unwrap(), &g).unwrap();
        assert!((v - 4.0 / 3.0 * PI * (1.0 + s).powi(3)).abs() < 1e-12);
    }
    let vals = sample(&SphericalFunction::constant(3, 2.0), &g).unwrap();
    assert!(vals.iter().all(|&v| v == 2.0));
}
