//! Dense symmetric matrices with just enough linear algebra for small
//! dimensions: Frobenius geometry, trace pairings, and eigenvalues by
//! cyclic Jacobi rotations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A `d x d` real symmetric matrix stored row-major. The constructor
/// symmetrizes its input so `entries[i][j] == entries[j][i]` holds exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<f64>>", into = "Vec<Vec<f64>>")]
pub struct SymMatrix {
    dimension: usize,
    entries: Vec<f64>,
}

impl TryFrom<Vec<Vec<f64>>> for SymMatrix {
    type Error = Error;
    fn try_from(rows: Vec<Vec<f64>>) -> Result<Self> {
        SymMatrix::from_rows(&rows)
    }
}

impl From<SymMatrix> for Vec<Vec<f64>> {
    fn from(m: SymMatrix) -> Self {
        (0..m.dimension)
            .map(|i| m.entries[i * m.dimension..(i + 1) * m.dimension].to_vec())
            .collect()
    }
}

impl SymMatrix {
    pub fn new(dimension: usize, entries: Vec<f64>) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::Construction("matrix dimension must be >= 1".into()));
        }
        if entries.len() != dimension * dimension {
            return Err(Error::Construction(format!(
                "expected {} entries for a {dimension}x{dimension} matrix, got {}",
                dimension * dimension,
                entries.len()
            )));
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::Construction("matrix entries must be finite".into()));
        }
        let mut m = SymMatrix { dimension, entries };
        for i in 0..dimension {
            for j in 0..i {
                let avg = 0.5 * (m.entries[i * dimension + j] + m.entries[j * dimension + i]);
                m.entries[i * dimension + j] = avg;
                m.entries[j * dimension + i] = avg;
            }
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let d = rows.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Construction("matrix rows must form a square".into()));
        }
        Self::new(d, rows.concat())
    }

    pub fn scalar(value: f64) -> Self {
        Self::new(1, vec![value]).expect("1x1 matrix")
    }

    pub fn zero(dimension: usize) -> Self {
        Self::new(dimension, vec![0.0; dimension * dimension]).expect("zero matrix")
    }

    pub fn identity(dimension: usize) -> Self {
        Self::diagonal(&vec![1.0; dimension])
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        let mut entries = vec![0.0; d * d];
        for (i, v) in diag.iter().enumerate() {
            entries[i * d + i] = *v;
        }
        Self::new(d, entries).expect("diagonal matrix")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.dimension + j]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// `sqrt(sum_ij a_ij^2)`.
    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|e| e * e).sum::<f64>().sqrt()
    }

    /// `tr[A B]` for symmetric `A`, `B`, i.e. `sum_ij a_ij b_ij`.
    pub fn trace_product(&self, other: &SymMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dimension).map(|i| self.get(i, i)).sum()
    }

    pub fn add(&self, other: &SymMatrix) -> SymMatrix {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a + b)
            .collect();
        SymMatrix {
            dimension: self.dimension,
            entries,
        }
    }

    pub fn sub(&self, other: &SymMatrix) -> SymMatrix {
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a - b)
            .collect();
        SymMatrix {
            dimension: self.dimension,
            entries,
        }
    }

    pub fn scale(&self, factor: f64) -> SymMatrix {
        let entries = self.entries.iter().map(|a| a * factor).collect();
        SymMatrix {
            dimension: self.dimension,
            entries,
        }
    }

    pub fn distance(&self, other: &SymMatrix) -> f64 {
        self.sub(other).frobenius_norm()
    }

    /// Eigenvalues in ascending order, by cyclic Jacobi sweeps. Intended
    /// for the small dimensions used here; converges quadratically.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let d = self.dimension;
        if d == 1 {
            return vec![self.entries[0]];
        }
        let mut a = self.entries.clone();
        let scale = self.frobenius_norm().max(1.0);
        for _sweep in 0..64 {
            let mut off = 0.0;
            for i in 0..d {
                for j in i + 1..d {
                    off += a[i * d + j] * a[i * d + j];
                }
            }
            if off.sqrt() <= 1e-15 * scale {
                break;
            }
            for p in 0..d {
                for q in p + 1..d {
                    let apq = a[p * d + q];
                    if apq.abs() <= 1e-300 {
                        continue;
                    }
                    let app = a[p * d + p];
                    let aqq = a[q * d + q];
                    let theta = (aqq - app) / (2.0 * apq);
                    let t = if theta >= 0.0 {
                        1.0 / (theta + (1.0 + theta * theta).sqrt())
                    } else {
                        1.0 / (theta - (1.0 + theta * theta).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;
                    for k in 0..d {
                        let akp = a[k * d + p];
                        let akq = a[k * d + q];
                        a[k * d + p] = c * akp - s * akq;
                        a[k * d + q] = s * akp + c * akq;
                    }
                    for k in 0..d {
                        let apk = a[p * d + k];
                        let aqk = a[q * d + k];
                        a[p * d + k] = c * apk - s * aqk;
                        a[q * d + k] = s * apk + c * aqk;
                    }
                }
            }
        }
        let mut eigs: Vec<f64> = (0..d).map(|i| a[i * d + i]).collect();
        eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
        eigs
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Positive semidefinite up to the given eigenvalue tolerance.
    pub fn is_psd(&self, tol: f64) -> bool {
        self.min_eigenvalue() >= -tol
    }

    /// A random symmetric matrix with unit Frobenius norm; entries are
    /// drawn uniformly before normalization.
    pub fn random_unit(dimension: usize, rng: &mut impl Rng) -> SymMatrix {
        loop {
            let mut entries = vec![0.0; dimension * dimension];
            for i in 0..dimension {
                for j in 0..=i {
                    let v = rng.random_range(-1.0..1.0);
                    entries[i * dimension + j] = v;
                    entries[j * dimension + i] = v;
                }
            }
            let m = SymMatrix { dimension, entries };
            let n = m.frobenius_norm();
            if n > 1e-6 {
                return m.scale(1.0 / n);
            }
        }
    }

    /// A random positive semidefinite matrix `B^T B` with entries of `B`
    /// uniform in `[-scale, scale]`.
    pub fn random_psd(dimension: usize, scale: f64, rng: &mut impl Rng) -> SymMatrix {
        let d = dimension;
        let b: Vec<f64> = (0..d * d)
            .map(|_| rng.random_range(-scale..scale))
            .collect();
        let mut entries = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                let mut acc = 0.0;
                for k in 0..d {
                    acc += b[k * d + i] * b[k * d + j];
                }
                entries[i * d + j] = acc;
            }
        }
        SymMatrix { dimension, entries }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn constructor_symmetrizes() {
        let m = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![4.0, 3.0]]).unwrap();
        assert_eq!(m.get(0, 1), 3.0);
        assert_eq!(m.get(1, 0), 3.0);
    }

    #[test]
    fn frobenius_examples() {
        assert_eq!(SymMatrix::zero(3).frobenius_norm(), 0.0);
        assert!((SymMatrix::identity(2).frobenius_norm() - 2.0_f64.sqrt()).abs() < 1e-15);
        let m = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!((m.frobenius_norm() - 10.0_f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn eigenvalues_of_known_matrices() {
        let m = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        let e = m.eigenvalues();
        assert!((e[0] + 1.0).abs() < 1e-12);
        assert!((e[1] - 3.0).abs() < 1e-12);

        let m = SymMatrix::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, 2.0, 1.0],
            vec![0.0, 1.0, 2.0],
        ])
        .unwrap();
        let e = m.eigenvalues();
        let s = 2.0_f64.sqrt();
        assert!((e[0] - (2.0 - s)).abs() < 1e-12);
        assert!((e[1] - 2.0).abs() < 1e-12);
        assert!((e[2] - (2.0 + s)).abs() < 1e-12);
    }

    #[test]
    fn random_psd_is_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for d in 1..=3 {
            for _ in 0..50 {
                let m = SymMatrix::random_psd(d, 2.0, &mut rng);
                assert!(m.is_psd(1e-10), "{m:?}");
            }
        }
    }

    #[test]
    fn random_unit_has_unit_norm() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..=3 {
            let m = SymMatrix::random_unit(d, &mut rng);
            assert!((m.frobenius_norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_pairing_matches_definition() {
        let a = SymMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, -1.0]]).unwrap();
        let q = SymMatrix::from_rows(&[vec![3.0, 0.5], vec![0.5, 2.0]]).unwrap();
        // tr[AQ] by explicit matrix product: diag(AQ) = (4, -1), trace 3.
        assert!((a.trace_product(&q) - 3.0).abs() < 1e-15);
    }
}
