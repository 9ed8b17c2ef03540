//! Closed-form spectra of cyclic matrices.
//!
//! The eigenvalues are the discrete Fourier transform of the first row,
//! `E_l = Σ_p a_p ω^{p l}` with `ω = exp(2πi/N)` (0-based `p`, `l`), and the
//! eigenvectors are the Fourier columns `u_l[j] = ω^{j l} / √N`.
//!
//! Indices are 0-based throughout: `l = 0` is always real, `l = N/2` is real
//! for even `N`, and every other `l` is paired with its conjugate partner
//! `N - l`. Classification is purely by index.
//!
//! The inverse map uses `S[i][l] = ω^{-i l}`, which is symmetric and obeys
//! `S² = N η`; recovering the coefficients therefore needs the `1/N` factor:
//! `a_i = (1/N) Σ_l S[i][l] E_l`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::ensemble::{FirstRow, ParityMatrix};
use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigenClass {
    Real,
    ConjugatePair { partner: usize },
}

impl EigenClass {
    pub fn is_real(self) -> bool {
        matches!(self, EigenClass::Real)
    }
}

/// Conjugate partner of 0-based index `l`.
#[inline]
pub fn partner_index(n: usize, l: usize) -> usize {
    (n - l) % n
}

/// Structural class of eigenvalue `l` of an `N × N` cyclic matrix.
pub fn classify(n: usize, l: usize) -> EigenClass {
    let partner = partner_index(n, l);
    if partner == l {
        EigenClass::Real
    } else {
        EigenClass::ConjugatePair { partner }
    }
}

/// Table of `ω^m`, `m = 0..N`, with `ω^{N-m}` set to the exact conjugate of `ω^m`.
pub(crate) fn roots_of_unity<T: Real>(n: usize) -> Vec<Complex<T>> {
    let mut table = vec![Complex::new(T::one(), T::zero()); n];
    let step = T::TAU() / T::from_usize_lossy(n);
    for m in 1..=n / 2 {
        let theta = step * T::from_usize_lossy(m);
        table[m] = Complex::new(theta.cos(), theta.sin());
        table[n - m] = table[m].conj();
    }
    if n % 2 == 0 {
        table[n / 2] = Complex::new(-T::one(), T::zero());
    }
    if n % 4 == 0 {
        table[n / 4] = Complex::new(T::zero(), T::one());
        table[3 * n / 4] = Complex::new(T::zero(), -T::one());
    }
    table
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Spectrum<T> {
    eigenvalues: Vec<Complex<T>>,
    labels: Vec<EigenClass>,
    realization_index: usize,
}

impl<T: Real> Spectrum<T> {
    /// Wraps raw eigenvalues, labelling them by index.
    pub fn from_eigenvalues(eigenvalues: Vec<Complex<T>>, realization_index: usize) -> Result<Self> {
        let n = eigenvalues.len();
        if n < 2 {
            return Err(Error::domain(format!("spectrum needs N >= 2, got {n}")));
        }
        Ok(Self {
            labels: (0..n).map(|l| classify(n, l)).collect(),
            eigenvalues,
            realization_index,
        })
    }

    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[Complex<T>] {
        &self.eigenvalues
    }

    pub fn eigenvalue(&self, l: usize) -> Complex<T> {
        self.eigenvalues[l]
    }

    pub fn labels(&self) -> &[EigenClass] {
        &self.labels
    }

    pub fn realization_index(&self) -> usize {
        self.realization_index
    }

    pub fn real_indices(&self) -> Vec<usize> {
        (0..self.dimension()).filter(|&l| self.labels[l].is_real()).collect()
    }

    pub fn complex_indices(&self) -> Vec<usize> {
        (0..self.dimension()).filter(|&l| !self.labels[l].is_real()).collect()
    }

    /// Conjugate pairs `(l, N - l)` with `l < N - l`.
    pub fn conjugate_pairs(&self) -> Vec<(usize, usize)> {
        let n = self.dimension();
        (1..n)
            .map(|l| (l, partner_index(n, l)))
            .filter(|&(l, p)| l < p)
            .collect()
    }

    /// Largest `|E_l - conj(E_partner)|` over paired indices.
    pub fn pairing_defect(&self) -> T {
        self.conjugate_pairs()
            .into_iter()
            .map(|(l, p)| (self.eigenvalues[l] - self.eigenvalues[p].conj()).norm())
            .fold(T::zero(), T::max)
    }

    fn max_modulus(&self) -> T {
        self.eigenvalues.iter().map(|e| e.norm()).fold(T::zero(), T::max)
    }
}

/// Eigenvalues by direct `O(N²)` DFT of the first row.
pub fn eigenvalues_dft<T: Real>(row: &FirstRow<T>) -> Spectrum<T> {
    let n = row.dimension();
    let omega = roots_of_unity::<T>(n);
    let a = row.coefficients();
    let eigenvalues = (0..n)
        .map(|l| {
            a.iter()
                .enumerate()
                .fold(Complex::new(T::zero(), T::zero()), |acc, (p, &ap)| {
                    acc + omega[(p * l) % n] * ap
                })
        })
        .collect();
    Spectrum {
        labels: (0..n).map(|l| classify(n, l)).collect(),
        eigenvalues,
        realization_index: row.realization_index(),
    }
}

/// Normalized Fourier column `u_l[j] = ω^{j l} / √N`.
pub fn fourier_eigenvector<T: Real>(n: usize, l: usize) -> Result<Vec<Complex<T>>> {
    if n < 1 || l >= n {
        return Err(Error::Range { index: l, bound: n });
    }
    let omega = roots_of_unity::<T>(n);
    let scale = T::from_usize_lossy(n).sqrt().recip();
    Ok((0..n).map(|j| omega[(j * l) % n] * scale).collect())
}

/// Recovers the first row from a spectrum via the `S` matrix.
///
/// Fails with [`Error::Consistency`] when the result has a non-negligible
/// imaginary part, i.e. the spectrum is not conjugate-paired.
pub fn inverse_coefficients<T: Real>(spec: &Spectrum<T>) -> Result<FirstRow<T>> {
    let n = spec.dimension();
    let omega = roots_of_unity::<T>(n);
    let inv_n = T::from_usize_lossy(n).recip();
    let mut coefficients = Vec::with_capacity(n);
    let mut residue = T::zero();
    for i in 0..n {
        let sum = spec
            .eigenvalues()
            .iter()
            .enumerate()
            .fold(Complex::new(T::zero(), T::zero()), |acc, (l, &e)| {
                acc + omega[(i * l) % n].conj() * e
            })
            * inv_n;
        residue = residue.max(sum.im.abs());
        coefficients.push(sum.re);
    }
    let tolerance = imaginary_tolerance::<T>() * (T::one() + spec.max_modulus());
    if residue > tolerance {
        return Err(Error::Consistency {
            residue: residue.to_f64_lossy(),
            tolerance: tolerance.to_f64_lossy(),
        });
    }
    FirstRow::with_index(coefficients, spec.realization_index())
}

fn imaginary_tolerance<T: Real>() -> T {
    T::lit(1e-10).max(T::epsilon() * T::lit(1e4))
}

/// `S[i][l] = ω^{i (N - l)}` (0-based), the kernel of the inverse map.
#[derive(Debug, Clone, PartialEq)]
pub struct SMatrix<T> {
    entries: DenseMatrix<Complex<T>>,
}

impl<T: Real> SMatrix<T> {
    pub fn dimension(&self) -> usize {
        self.entries.rows()
    }

    pub fn entries(&self) -> &DenseMatrix<Complex<T>> {
        &self.entries
    }

    pub fn get(&self, i: usize, l: usize) -> Complex<T> {
        self.entries.get(i, l)
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.dimension();
        (0..n).all(|i| (0..n).all(|l| self.get(i, l) == self.get(l, i)))
    }

    pub fn square(&self) -> DenseMatrix<Complex<T>> {
        self.entries
            .matmul(&self.entries)
            .expect("S is square")
    }

    /// Largest entry of `|S² - N η|`.
    pub fn square_identity_residual(&self, eta: &ParityMatrix) -> Result<T> {
        let n = self.dimension();
        if eta.dimension() != n {
            return Err(Error::Shape {
                expected: n,
                actual: eta.dimension(),
            });
        }
        let sq = self.square();
        let n_t = T::from_usize_lossy(n);
        let mut worst = T::zero();
        for i in 0..n {
            for j in 0..n {
                let target = if eta.image(i) == j { n_t } else { T::zero() };
                worst = worst.max((sq.get(i, j) - Complex::new(target, T::zero())).norm());
            }
        }
        Ok(worst)
    }
}

pub fn s_matrix<T: Real>(n: usize) -> Result<SMatrix<T>> {
    if n < 2 {
        return Err(Error::domain(format!("S matrix needs N >= 2, got {n}")));
    }
    let omega = roots_of_unity::<T>(n);
    Ok(SMatrix {
        entries: DenseMatrix::from_fn(n, n, |i, l| omega[(i * ((n - l) % n)) % n]),
    })
}
