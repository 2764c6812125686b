// Licensed under the Apache License, Version 2.0 (the "License"); you may
// not use this file except in compliance with the License. You may obtain
// a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
// WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
// License for the specific language governing permissions and limitations
// under the License.

//! Spectral decomposition of small unitary matrices.
//!
//! Unitary matrices are normal, so the complex Schur form `Q T Q†` has a
//! diagonal `T`: the diagonal holds the eigenvalues and the columns of `Q`
//! are an orthonormal eigenbasis.

use nalgebra::{DMatrix, DVector};

use crate::{tolerance, C64};

#[derive(Debug, Clone)]
pub struct EigenSystem {
    /// Sorted by phase angle in `(−π, π]`.
    pub eigenvalues: Vec<C64>,
    /// Column `k` is the eigenvector of `eigenvalues[k]`.
    pub eigenvectors: DMatrix<C64>,
    /// Largest strictly upper-triangular Schur entry.
    pub off_diagonal: f64,
}

impl EigenSystem {
    /// Returns `None` when the Schur form is not diagonal to within
    /// [`tolerance::SCHUR_OFF_DIAGONAL`].
    pub fn of_normal(matrix: &DMatrix<C64>) -> Option<Self> {
        let dim = matrix.nrows();
        let (q, t) = nalgebra::Schur::try_new(matrix.clone(), 1e-15, 10_000)?.unpack();
        let mut off_diagonal = 0.0f64;
        for j in 0..dim {
            for i in 0..j {
                off_diagonal = off_diagonal.max(t[(i, j)].norm());
            }
        }
        if off_diagonal > tolerance::SCHUR_OFF_DIAGONAL {
            return None;
        }
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&a, &b| t[(a, a)].arg().total_cmp(&t[(b, b)].arg()));
        let eigenvalues = order.iter().map(|&k| t[(k, k)]).collect();
        let eigenvectors = DMatrix::from_fn(dim, dim, |i, k| q[(i, order[k])]);
        Some(EigenSystem { eigenvalues, eigenvectors, off_diagonal })
    }

    /// `⟨u_λ|c⟩` for every eigenvector.
    pub fn overlaps(&self, c: &DVector<C64>) -> DVector<C64> {
        self.eigenvectors.adjoint() * c
    }

    /// `Σ_λ λⁿ ⟨u_λ|c⟩ |u_λ⟩`.
    pub fn evolve(&self, c: &DVector<C64>, steps: usize) -> DVector<C64> {
        let overlaps = self.overlaps(c);
        let weighted = DVector::from_iterator(
            overlaps.len(),
            overlaps.iter().zip(&self.eigenvalues).map(|(o, lambda)| {
                let (modulus, angle) = lambda.to_polar();
                o * C64::from_polar(modulus.powi(steps as i32), angle * steps as f64)
            }),
        );
        &self.eigenvectors * weighted
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rotation(angle: f64) -> DMatrix<C64> {
        let (s, c) = angle.sin_cos();
        DMatrix::from_row_slice(2, 2, &[C64::new(c, 0.0), C64::new(-s, 0.0), C64::new(s, 0.0), C64::new(c, 0.0)])
    }

    #[test]
    fn rotation_spectrum() {
        let sys = EigenSystem::of_normal(&rotation(0.3)).unwrap();
        assert!((sys.eigenvalues[0] - C64::from_polar(1.0, -0.3)).norm() < 1e-12);
        assert!((sys.eigenvalues[1] - C64::from_polar(1.0, 0.3)).norm() < 1e-12);
        let gram = sys.eigenvectors.adjoint() * &sys.eigenvectors;
        assert!(crate::max_modulus(&(gram - DMatrix::identity(2, 2))) < 1e-12);
    }

    #[test]
    fn spectral_power_matches_repeated_product() {
        let m = rotation(0.7);
        let sys = EigenSystem::of_normal(&m).unwrap();
        let c = DVector::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
        let mut direct = c.clone();
        for n in 0..50 {
            assert!(crate::max_modulus(&(sys.evolve(&c, n) - &direct)) < 1e-12);
            direct = &m * direct;
        }
    }

    #[test]
    fn jordan_block_is_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
        assert!(EigenSystem::of_normal(&m).is_none());
    }
}
