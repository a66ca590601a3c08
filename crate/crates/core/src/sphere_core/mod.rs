//! Grids, quadrature and differential operators on `S^{n-1}`.

mod function;
mod grid;

pub use function::{Evaluator, SphericalFunction, FD_STEP};
pub(crate) use grid::householder_frame;
pub use grid::{SphereGrid, MAX_RESOLUTION, MIN_RESOLUTION};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::jet::Jet;
use crate::linalg;

/// Build a quadrature grid on `S^{n-1}`.
pub fn build_grid(n: usize, resolution: usize) -> Result<SphereGrid> {
    SphereGrid::new(n, resolution)
}

fn check_dim(f: &SphericalFunction, grid: &SphereGrid) -> Result<()> {
    if f.dim() != grid.dim() {
        return Err(Error::DimensionMismatch { expected: grid.dim(), found: f.dim() });
    }
    Ok(())
}

/// Values of `f` at the grid nodes.
pub fn sample(f: &SphericalFunction, grid: &SphereGrid) -> Result<Vec<f64>> {
    check_dim(f, grid)?;
    Ok(grid.map_nodes(|_, u| f.value(u)))
}

/// `sum_k w_k f(u_k)`.
pub fn integrate(f: &SphericalFunction, grid: &SphereGrid) -> Result<f64> {
    Ok(grid.integrate_values(&sample(f, grid)?))
}

pub fn spherical_gradient(psi: &SphericalFunction, u: &[f64]) -> Vec<f64> {
    psi.spherical_gradient(u)
}

/// `int |grad_sigma psi|^2 du`.
pub fn gradient_energy(psi: &SphericalFunction, grid: &SphereGrid) -> Result<f64> {
    check_dim(psi, grid)?;
    let vals = grid.map_nodes(|_, u| psi.spherical_gradient(u).iter().map(|g| g * g).sum::<f64>());
    Ok(grid.integrate_values(&vals))
}

/// `Q = psi I + E^T D^2 psi~ E` from an order-2 jet of the 0-homogeneous
/// extension and a tangent frame `E` (rows). Returned row-major,
/// `(n-1) x (n-1)`.
pub fn tangent_curvature(jet: &Jet, frame: &[f64]) -> Vec<f64> {
    let n = jet.dim();
    let m = n - 1;
    let mut q = vec![0.0; m * m];
    for a in 0..m {
        let ea = &frame[a * n..(a + 1) * n];
        for b in a..m {
            let eb = &frame[b * n..(b + 1) * n];
            let mut s = 0.0;
            for i in 0..n {
                if ea[i] == 0.0 {
                    continue;
                }
                for j in 0..n {
                    s += ea[i] * jet.h(i, j) * eb[j];
                }
            }
            if a == b {
                s += jet.value;
            }
            q[a * m + b] = s;
            q[b * m + a] = s;
        }
    }
    q
}

/// Per-node curvature matrices `Q(h; u)` in the grid's tangent frames.
#[derive(Clone, Debug)]
pub struct CurvatureField {
    size: usize,
    matrices: Vec<f64>,
    min_eigenvalues: Vec<f64>,
    determinants: Vec<f64>,
}

impl CurvatureField {
    pub(crate) fn from_matrices(size: usize, matrices: Vec<f64>) -> Self {
        let stride = size * size;
        let count = matrices.len() / stride.max(1);
        let mut min_eigenvalues = Vec::with_capacity(count);
        let mut determinants = Vec::with_capacity(count);
        for k in 0..count {
            let q = &matrices[k * stride..(k + 1) * stride];
            min_eigenvalues.push(linalg::sym_eigenvalues(size, q)[0]);
            determinants.push(linalg::det(size, q));
        }
        Self { size, matrices, min_eigenvalues, determinants }
    }

    /// Matrix size `n - 1`.
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn len(&self) -> usize {
        self.determinants.len()
    }

    pub fn is_empty(&self) -> bool {
        self.determinants.is_empty()
    }

    pub fn matrix(&self, k: usize) -> &[f64] {
        let s = self.size * self.size;
        &self.matrices[k * s..(k + 1) * s]
    }

    pub fn min_eigenvalue(&self, k: usize) -> f64 {
        self.min_eigenvalues[k]
    }

    pub fn determinant(&self, k: usize) -> f64 {
        self.determinants[k]
    }

    pub fn determinants(&self) -> &[f64] {
        &self.determinants
    }

    pub fn eigenvalues(&self, k: usize) -> Vec<f64> {
        linalg::sym_eigenvalues(self.size, self.matrix(k))
    }

    /// Smallest eigenvalue over all nodes, with its node index.
    pub fn global_min(&self) -> (usize, f64) {
        self.min_eigenvalues
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::INFINITY), |acc, (k, v)| if v < acc.1 { (k, v) } else { acc })
    }
}

/// Order-2 jets of the 0-homogeneous extension at every node.
pub(crate) fn node_jets(f: &SphericalFunction, grid: &SphereGrid, order: u8) -> Vec<Jet> {
    grid.map_nodes(|_, u| f.jet(u, order))
}

/// Curvature matrix field of `h` on the grid.
pub fn curvature_matrix(h: &SphericalFunction, grid: &SphereGrid) -> Result<CurvatureField> {
    check_dim(h, grid)?;
    let jets = node_jets(h, grid, 2);
    Ok(curvature_from_jets(&jets, grid))
}

pub(crate) fn curvature_from_jets(jets: &[Jet], grid: &SphereGrid) -> CurvatureField {
    let m = grid.dim() - 1;
    let mats: Vec<Vec<f64>> = jets.par_iter().enumerate().map(|(k, j)| tangent_curvature(j, grid.frame(k))).collect();
    CurvatureField::from_matrices(m, mats.concat())
}

/// `Delta_sigma psi`.
pub fn laplace_beltrami(psi: &SphericalFunction, grid: &SphereGrid) -> Result<SphericalFunction> {
    check_dim(psi, grid)?;
    Ok(psi.laplace_beltrami())
}

/// Split `psi` into its mean and the zero-mean remainder.
pub fn split_mean(psi: &SphericalFunction, grid: &SphereGrid) -> Result<(f64, SphericalFunction)> {
    let mean = integrate(psi, grid)? / grid.surface_area();
    Ok((mean, psi.offset(-mean)))
}

/// Rayleigh quotient `int |grad_sigma psi|^2 / int psi^2` of a zero-mean
/// function.
pub fn poincare_ratio(psi: &SphericalFunction, grid: &SphereGrid) -> Result<f64> {
    let vals = sample(psi, grid)?;
    let mean = grid.integrate_values(&vals);
    let sq: Vec<f64> = vals.iter().map(|v| v * v).collect();
    let l2 = grid.integrate_values(&sq);
    if l2 <= f64::MIN_POSITIVE || l2.sqrt() < 1e-150 {
        return Err(Error::ZeroFunction);
    }
    if mean.abs() > 1e-10 * l2.sqrt().max(1.0) {
        return Err(Error::NonZeroMean(mean));
    }
    Ok(gradient_energy(psi, grid)? / l2)
}
