//! The Gaussian ensemble of real cyclic matrices and its generalized parity.
//!
//! A realization is fully determined by its first row `a_1..a_N`. The weight
//! `exp(-A tr MᵀM)` with `tr MᵀM = N Σ a_i²` makes the coefficients i.i.d.
//! normal with variance `1/(2NA)`.
//!
//! Every realization draws from its own ChaCha stream keyed by
//! `(master_seed, realization_index)`, so an ensemble is reproducible no
//! matter how realizations are scheduled across threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleConfig {
    pub dimension: usize,
    /// Scale `A` of the Gaussian weight.
    pub scale: f64,
    pub realizations: usize,
    pub master_seed: u64,
}

impl EnsembleConfig {
    pub fn new(dimension: usize, scale: f64, realizations: usize, master_seed: u64) -> Result<Self> {
        let config = Self {
            dimension,
            scale,
            realizations,
            master_seed,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimension < 2 {
            return Err(Error::Config(format!(
                "dimension must be at least 2, got {}",
                self.dimension
            )));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Config(format!(
                "scale A must be positive and finite, got {}",
                self.scale
            )));
        }
        if self.realizations == 0 {
            return Err(Error::Config("realization count must be at least 1".into()));
        }
        Ok(())
    }

    /// Variance `1/(2NA)` of each first-row coefficient.
    pub fn coefficient_variance(&self) -> f64 {
        1.0 / (2.0 * self.dimension as f64 * self.scale)
    }

    pub fn with_scale(&self, scale: f64) -> Self {
        Self { scale, ..*self }
    }
}

/// Independent random streams attached to one realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Substream {
    /// Gaussian draws for the first-row coefficients.
    Coefficients,
    /// Uniform choices made while extracting spacings.
    Selection,
}

impl Substream {
    fn salt(self) -> u64 {
        match self {
            Substream::Coefficients => 0,
            Substream::Selection => 0x9E37_79B9_7F4A_7C15,
        }
    }
}

/// Deterministic generator for `(master_seed, realization_index, purpose)`.
pub fn realization_rng(master_seed: u64, realization_index: usize, purpose: Substream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed ^ purpose.salt());
    rng.set_stream(realization_index as u64);
    rng
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstRow<T> {
    coefficients: Vec<T>,
    realization_index: usize,
}

impl<T: Real> FirstRow<T> {
    pub fn new(coefficients: Vec<T>) -> Result<Self> {
        Self::with_index(coefficients, 0)
    }

    pub fn with_index(coefficients: Vec<T>, realization_index: usize) -> Result<Self> {
        if coefficients.len() < 2 {
            return Err(Error::domain(format!(
                "a cyclic matrix needs at least 2 coefficients, got {}",
                coefficients.len()
            )));
        }
        Ok(Self {
            coefficients,
            realization_index,
        })
    }

    pub fn from_f64(coefficients: &[f64]) -> Result<Self> {
        Self::new(coefficients.iter().map(|&x| T::lit(x)).collect())
    }

    pub fn dimension(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn realization_index(&self) -> usize {
        self.realization_index
    }

    pub fn max_abs(&self) -> T {
        self.coefficients
            .iter()
            .fold(T::zero(), |acc, &a| acc.max(a.abs()))
    }
}

/// Draws the first row of realization `k`.
pub fn sample_first_row<T: Real>(config: &EnsembleConfig, k: usize) -> Result<FirstRow<T>> {
    config.validate()?;
    if k >= config.realizations {
        return Err(Error::Range {
            index: k,
            bound: config.realizations,
        });
    }
    let sigma = config.coefficient_variance().sqrt();
    let mut rng = realization_rng(config.master_seed, k, Substream::Coefficients);
    let coefficients = (0..config.dimension)
        .map(|_| {
            let g: f64 = rng.sample(StandardNormal);
            T::lit(g * sigma)
        })
        .collect();
    FirstRow::with_index(coefficients, k)
}

/// Dense form with `M[i][j] = a[(j - i) mod N]` (0-based): each row is the
/// previous one shifted right by one place.
pub fn materialize_matrix<T: Real>(row: &FirstRow<T>) -> DenseMatrix<T> {
    let n = row.dimension();
    let a = row.coefficients();
    DenseMatrix::from_fn(n, n, |i, j| a[(j + n - i) % n])
}

/// Generalized parity: the involution fixing index 1 and reversing the rest,
/// stored as a 0-based index map `p(0) = 0`, `p(j) = N - j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParityMatrix {
    index_map: Vec<usize>,
}

impl ParityMatrix {
    pub fn dimension(&self) -> usize {
        self.index_map.len()
    }

    pub fn index_map(&self) -> &[usize] {
        &self.index_map
    }

    /// Image of 0-based index `j`.
    #[inline]
    pub fn image(&self, j: usize) -> usize {
        self.index_map[j]
    }

    pub fn fixed_points(&self) -> Vec<usize> {
        (0..self.dimension()).filter(|&j| self.image(j) == j).collect()
    }

    /// `(η v)_j = v_{p(j)}`; a pure rearrangement.
    pub fn apply<V: Clone>(&self, v: &[V]) -> Result<Vec<V>> {
        if v.len() != self.dimension() {
            return Err(Error::Shape {
                expected: self.dimension(),
                actual: v.len(),
            });
        }
        Ok(self.index_map.iter().map(|&p| v[p].clone()).collect())
    }

    pub fn to_dense<T: Real>(&self) -> DenseMatrix<T> {
        let n = self.dimension();
        DenseMatrix::from_fn(n, n, |i, j| {
            if self.image(i) == j {
                T::one()
            } else {
                T::zero()
            }
        })
    }
}

pub fn generalized_parity(n: usize) -> Result<ParityMatrix> {
    if n < 2 {
        return Err(Error::domain(format!("generalized parity needs N >= 2, got {n}")));
    }
    Ok(ParityMatrix {
        index_map: (0..n).map(|j| (n - j) % n).collect(),
    })
}

/// Max-norm of `Mᵀ - η M η⁻¹`.
///
/// Since η is a permutation, `(η M η⁻¹)[i][j] = M[p(i)][p(j)]` and the
/// residual is computed by comparing entries, without any arithmetic on them.
pub fn pseudo_symmetry_residual<T: Real>(m: &DenseMatrix<T>, eta: &ParityMatrix) -> Result<T> {
    let n = eta.dimension();
    if !m.is_square() || m.rows() != n {
        return Err(Error::Shape {
            expected: n,
            actual: if m.rows() != n { m.rows() } else { m.cols() },
        });
    }
    let mut worst = T::zero();
    for i in 0..n {
        for j in 0..n {
            let lhs = m.get(j, i);
            let rhs = m.get(eta.image(i), eta.image(j));
            if lhs != rhs {
                worst = worst.max((lhs - rhs).abs());
            }
        }
    }
    Ok(worst)
}
