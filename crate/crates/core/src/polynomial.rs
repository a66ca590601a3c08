//! Ambient polynomials in `n` variables, used as the canonical representation
//! of smooth functions on the sphere (by restriction).

use std::collections::BTreeMap;
use std::fmt;

use crate::jet::Jet;

/// Sparse polynomial: exponent vector -> coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    dim: usize,
    terms: BTreeMap<Vec<u32>, f64>,
}

impl Polynomial {
    pub fn zero(dim: usize) -> Self {
        Self { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        Self::monomial(dim, vec![0; dim], c)
    }

    pub fn monomial(dim: usize, powers: Vec<u32>, coeff: f64) -> Self {
        assert_eq!(powers.len(), dim, "exponent vector length must equal the dimension");
        let mut p = Self::zero(dim);
        p.add_term(powers, coeff);
        p
    }

    /// The coordinate function `x_i`.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self::monomial(dim, e, 1.0)
    }

    /// `cos(k theta)` on the unit circle, i.e. `Re (x + i y)^k`.
    pub fn cos_k(k: u32) -> Self {
        Self::circle_harmonic(k, false)
    }

    /// `sin(k theta)` on the unit circle, i.e. `Im (x + i y)^k`.
    pub fn sin_k(k: u32) -> Self {
        Self::circle_harmonic(k, true)
    }

    fn circle_harmonic(k: u32, imaginary: bool) -> Self {
        let mut p = Self::zero(2);
        let mut binom = 1.0f64;
        for j in 0..=k {
            if j > 0 {
                binom = binom * f64::from(k - j + 1) / f64::from(j);
            }
            // i^j is real for even j, imaginary for odd j.
            let take = (j % 2 == 1) == imaginary;
            if take {
                let sign = if (j / 2) % 2 == 0 { 1.0 } else { -1.0 };
                p.add_term(vec![k - j, j], sign * binom);
            }
        }
        p
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, powers: Vec<u32>, coeff: f64) {
        assert_eq!(powers.len(), self.dim);
        if coeff == 0.0 {
            return;
        }
        let entry = self.terms.entry(powers).or_insert(0.0);
        *entry += coeff;
        if *entry == 0.0 {
            self.terms.retain(|_, c| *c != 0.0);
        }
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), *c);
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        if s == 0.0 {
            return Self::zero(self.dim);
        }
        Self { dim: self.dim, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut out = Self::zero(self.dim);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<u32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(e, c)| c * e.iter().zip(x).map(|(&k, &xi)| xi.powi(k as i32)).product::<f64>()).sum()
    }

    /// Evaluate on jets of the variables (shared powers are built once).
    pub fn eval_jet(&self, vars: &[Jet]) -> Jet {
        let n = self.dim;
        let order = vars[0].order();
        let mut acc = Jet::constant(n, order, 0.0);
        if self.terms.is_empty() {
            return acc;
        }
        let maxdeg: Vec<u32> = (0..n).map(|i| self.terms.keys().map(|e| e[i]).max().unwrap_or(0)).collect();
        let powers: Vec<Vec<Jet>> = (0..n)
            .map(|i| {
                let mut p = vec![Jet::constant(n, order, 1.0)];
                for k in 1..=maxdeg[i] as usize {
                    let next = p[k - 1].mul(&vars[i]);
                    p.push(next);
                }
                p
            })
            .collect();
        for (e, c) in &self.terms {
            let mut term: Option<Jet> = None;
            for (i, &k) in e.iter().enumerate() {
                if k == 0 {
                    continue;
                }
                let f = &powers[i][k as usize];
                term = Some(match term {
                    None => f.clone(),
                    Some(t) => t.mul(f),
                });
            }
            acc = match term {
                None => acc.add_scalar(*c),
                Some(t) => acc.axpby(1.0, &t, *c),
            };
        }
        acc
    }

    /// Split into homogeneous components, keyed by degree.
    pub fn homogeneous_components(&self) -> BTreeMap<u32, Polynomial> {
        let mut out: BTreeMap<u32, Polynomial> = BTreeMap::new();
        for (e, c) in &self.terms {
            let d = e.iter().sum();
            out.entry(d).or_insert_with(|| Self::zero(self.dim)).add_term(e.clone(), *c);
        }
        out
    }

    pub fn partial(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e[i] > 0 {
                let mut f = e.clone();
                f[i] -= 1;
                out.add_term(f, c * f64::from(e[i]));
            }
        }
        out
    }

    /// Euclidean Laplacian in the ambient space.
    pub fn laplacian(&self) -> Self {
        (0..self.dim).fold(Self::zero(self.dim), |acc, i| acc.add(&self.partial(i).partial(i)))
    }

    /// A polynomial whose restriction to the sphere equals the Laplace-Beltrami
    /// operator applied to the restriction of `self`:
    /// `Delta_sigma p = Delta p - sum_k k (k + n - 2) p_k` on the sphere,
    /// with `p_k` the degree-k homogeneous part.
    pub fn laplace_beltrami(&self) -> Self {
        let n = self.dim as f64;
        let mut out = self.laplacian();
        for (k, pk) in self.homogeneous_components() {
            let k = f64::from(k);
            out = out.add(&pk.scale(-k * (k + n - 2.0)));
        }
        out
    }

    /// Parity of the restriction: all even degrees -> even, all odd -> odd.
    pub fn parity(&self) -> Parity {
        let mut even = false;
        let mut odd = false;
        for e in self.terms.keys() {
            if e.iter().sum::<u32>() % 2 == 0 {
                even = true;
            } else {
                odd = true;
            }
        }
        match (even, odd) {
            (_, false) => Parity::Even,
            (false, true) => Parity::Odd,
            _ => Parity::Neither,
        }
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, &k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*u{}", i + 1)?,
                    _ => write!(f, "*u{}^{}", i + 1, k)?,
                }
            }
        }
        Ok(())
    }
}

/// Symmetry class of a function under `u -> -u`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
    Neither,
}

impl Parity {
    pub fn product(self, other: Parity) -> Parity {
        use Parity::*;
        match (self, other) {
            (Even, Even) | (Odd, Odd) => Even,
            (Even, Odd) | (Odd, Even) => Odd,
            _ => Neither,
        }
    }

    pub fn sum(self, other: Parity) -> Parity {
        if self == other {
            self
        } else {
            Parity::Neither
        }
    }
}
