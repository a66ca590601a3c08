use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::polynomial::Polynomial;
use crate::sphere_core::SphericalFunction;

pub const SUITE_SEED: u64 = 20_240_917;

/// `u_1`, i.e. `cos(theta)` on the circle.
pub fn first_harmonic(n: usize) -> SphericalFunction {
    SphericalFunction::coordinate(n, 0)
}

/// `u_1^2 - u_2^2`, i.e. `cos(2 theta)` on the circle.
pub fn second_harmonic(n: usize) -> SphericalFunction {
    let mut p = Polynomial::zero(n);
    let mut sq = |i: usize, c: f64| {
        let mut pw = vec![0; n];
        pw[i] = 2;
        p.add_term(pw, c);
    };
    sq(0, 1.0);
    sq(1, -1.0);
    SphericalFunction::polynomial(p)
}

fn monomials(n: usize, degree: u32) -> Vec<Vec<u32>> {
    if n == 1 {
        return vec![vec![degree]];
    }
    (0..=degree)
        .rev()
        .flat_map(|d| {
            monomials(n - 1, degree - d).into_iter().map(move |mut rest| {
                rest.insert(0, d);
                rest
            })
        })
        .collect()
}

/// Even polynomial of degree 4 with coefficients drawn from `seed`:
/// constant in `[-0.5, 0.5]`, higher terms in `[-0.25, 0.25]`.
pub fn random_even_polynomial(n: usize, seed: u64) -> SphericalFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = Polynomial::constant(n, rng.random_range(-0.5..0.5));
    for degree in [2, 4] {
        for pw in monomials(n, degree) {
            p.add_term(pw, rng.random_range(-0.25..0.25));
        }
    }
    SphericalFunction::polynomial(p)
}

/// `1`, first harmonic, second harmonic, random even polynomial.
pub fn direction_suite(n: usize) -> Vec<(&'static str, SphericalFunction)> {
    vec![
        ("constant", SphericalFunction::constant(n, 1.0)),
        ("first_harmonic", first_harmonic(n)),
        ("second_harmonic", second_harmonic(n)),
        ("random_even", random_even_polynomial(n, SUITE_SEED)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polynomial::Parity;

    #[test]
    fn suite_shapes() {
        assert_eq!(monomials(3, 2).len(), 6);
        assert_eq!(monomials(2, 4).len(), 5);
        for n in [2, 3, 4] {
            let s = direction_suite(n);
            assert_eq!(s.len(), 4);
            assert_eq!(s[1].1.parity(), Parity::Odd);
            assert_eq!(s[3].1.parity(), Parity::Even);
        }
        let u = [0.6, 0.8];
        assert!((second_harmonic(2).value(&u) - (0.36 - 0.64)).abs() < 1e-15);
        let a = random_even_polynomial(3, 1).value(&[0.0, 0.6, 0.8]);
        assert_eq!(a, random_even_polynomial(3, 1).value(&[0.0, 0.6, 0.8]));
    }
}
