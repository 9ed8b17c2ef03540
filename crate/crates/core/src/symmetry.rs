//! Eigenvector-level consequences of generalized parity.
//!
//! Real-class Fourier vectors are fixed by η. Complex-class vectors are
//! mapped onto their conjugate partner, so they are not η-eigenvectors and
//! their η-norm `⟨u, η u⟩` vanishes.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::ensemble::{generalized_parity, ParityMatrix};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::spectral::{classify, fourier_eigenvector, EigenClass};

pub fn eta_apply<T: Real>(v: &[Complex<T>], eta: &ParityMatrix) -> Result<Vec<Complex<T>>> {
    eta.apply(v)
}

fn max_abs<T: Real>(v: impl IntoIterator<Item = Complex<T>>) -> T {
    v.into_iter().map(|x| x.norm()).fold(T::zero(), T::max)
}

/// `min_{λ = ±1} ‖η v - λ v‖∞ / ‖v‖∞`.
pub fn eta_eigen_residual<T: Real>(v: &[Complex<T>], eta: &ParityMatrix) -> Result<T> {
    let ev = eta.apply(v)?;
    let scale = max_abs(v.iter().copied());
    if scale == T::zero() {
        return Err(Error::domain("eta eigen-residual of a zero vector"));
    }
    let plus = max_abs(ev.iter().zip(v).map(|(a, b)| a - b));
    let minus = max_abs(ev.iter().zip(v).map(|(a, b)| a + b));
    Ok(plus.min(minus) / scale)
}

fn sesquilinear<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    x.iter()
        .zip(y)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a.conj() * b)
}

fn bilinear<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    x.iter()
        .zip(y)
        .fold(Complex::new(T::zero(), T::zero()), |acc, (a, b)| acc + a * b)
}

/// `⟨v, η v⟩`, conjugate-linear in the first slot.
pub fn pt_norm<T: Real>(v: &[Complex<T>], eta: &ParityMatrix) -> Result<Complex<T>> {
    let ev = eta.apply(v)?;
    Ok(sesquilinear(v, &ev))
}

/// Both readings of the η-product of two vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EtaPairProduct<T> {
    /// `⟨v1, η v2⟩`
    pub sesquilinear: Complex<T>,
    /// `v1ᵀ η v2`
    pub bilinear: Complex<T>,
}

pub fn eta_pair_product<T: Real>(
    v1: &[Complex<T>],
    v2: &[Complex<T>],
    eta: &ParityMatrix,
) -> Result<EtaPairProduct<T>> {
    if v1.len() != v2.len() {
        return Err(Error::Shape {
            expected: v1.len(),
            actual: v2.len(),
        });
    }
    let ev2 = eta.apply(v2)?;
    Ok(EtaPairProduct {
        sesquilinear: sesquilinear(v1, &ev2),
        bilinear: bilinear(v1, &ev2),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenvectorRecord<T> {
    pub index: usize,
    pub class: EigenClass,
    pub eta_eigen_residual: T,
    pub pt_norm: Complex<T>,
    /// Product with the conjugate partner's vector, for paired indices.
    pub eta_pair_product: Option<EtaPairProduct<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetryReport<T> {
    pub dimension: usize,
    pub records: Vec<EigenvectorRecord<T>>,
}

impl<T: Real> SymmetryReport<T> {
    /// Largest η-eigen residual among real-class vectors.
    pub fn max_real_eigen_residual(&self) -> T {
        self.records
            .iter()
            .filter(|r| r.class.is_real())
            .map(|r| r.eta_eigen_residual)
            .fold(T::zero(), T::max)
    }

    /// Largest `|⟨u, η u⟩|` among complex-class vectors.
    pub fn max_complex_pt_norm(&self) -> T {
        self.complex().map(|r| r.pt_norm.norm()).fold(T::zero(), T::max)
    }

    /// Smallest η-eigen residual among complex-class vectors, `None` if there are none.
    pub fn min_complex_eigen_residual(&self) -> Option<T> {
        self.complex().map(|r| r.eta_eigen_residual).reduce(T::min)
    }

    /// Largest deviation of the partner products from `(1, 0)` for the
    /// sesquilinear and bilinear forms respectively.
    pub fn pair_product_extremes(&self) -> Option<(T, T, T, T)> {
        let products: Vec<_> = self.complex().filter_map(|r| r.eta_pair_product).collect();
        if products.is_empty() {
            return None;
        }
        let one = Complex::new(T::one(), T::zero());
        let fold = |f: &dyn Fn(&EtaPairProduct<T>) -> T| {
            products.iter().map(f).fold(T::zero(), T::max)
        };
        Some((
            fold(&|p| (p.sesquilinear - one).norm()),
            fold(&|p| p.sesquilinear.norm()),
            fold(&|p| (p.bilinear - one).norm()),
            fold(&|p| p.bilinear.norm()),
        ))
    }

    fn complex(&self) -> impl Iterator<Item = &EigenvectorRecord<T>> {
        self.records.iter().filter(|r| !r.class.is_real())
    }
}

/// Runs every η check on the Fourier eigenbasis of an `N × N` cyclic matrix.
pub fn symmetry_report<T: Real>(n: usize) -> Result<SymmetryReport<T>> {
    let eta = generalized_parity(n)?;
    let basis: Vec<Vec<Complex<T>>> = (0..n)
        .map(|l| fourier_eigenvector(n, l))
        .collect::<Result<_>>()?;
    let records = (0..n)
        .map(|l| {
            let class = classify(n, l);
            let u = &basis[l];
            let eta_pair_product = match class {
                EigenClass::Real => None,
                EigenClass::ConjugatePair { partner } => Some(eta_pair_product(u, &basis[partner], &eta)?),
            };
            Ok(EigenvectorRecord {
                index: l,
                class,
                eta_eigen_residual: eta_eigen_residual(u, &eta)?,
                pt_norm: pt_norm(u, &eta)?,
                eta_pair_product,
            })
        })
        .collect::<Result<_>>()?;
    Ok(SymmetryReport { dimension: n, records })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u(n: usize, l: usize) -> Vec<Complex<f64>> {
        fourier_eigenvector(n, l).unwrap()
    }

    #[test]
    fn eta_apply_three() {
        let eta = generalized_parity(3).unwrap();
        let v = [Complex::new(1.0, 0.5), Complex::new(2.0, 0.0), Complex::new(3.0, -1.0)];
        let w = eta_apply(&v, &eta).unwrap();
        assert_eq!(w, vec![v[0], v[2], v[1]]);
        assert_eq!(eta_apply(&w, &eta).unwrap(), v.to_vec());
    }

    #[test]
    fn eta_maps_fourier_vector_to_partner() {
        let eta = generalized_parity(4).unwrap();
        let mapped = eta_apply(&u(4, 1), &eta).unwrap();
        for (x, y) in mapped.iter().zip(u(4, 3)) {
            assert!((x - y).norm() < 1e-16);
        }
    }

    #[test]
    fn eigen_residuals() {
        for n in 2..10 {
            let eta = generalized_parity(n).unwrap();
            assert_eq!(eta_eigen_residual(&u(n, 0), &eta).unwrap(), 0.0);
        }
        let eta4 = generalized_parity(4).unwrap();
        assert_eq!(eta_eigen_residual(&u(4, 2), &eta4).unwrap(), 0.0);
        let eta3 = generalized_parity(3).unwrap();
        assert!(eta_eigen_residual(&u(3, 1), &eta3).unwrap() > 0.1);
        let zero = vec![Complex::new(0.0, 0.0); 3];
        assert!(matches!(eta_eigen_residual(&zero, &eta3), Err(Error::Domain(_))));
    }

    #[test]
    fn pt_norms() {
        for n in 2..12 {
            let eta = generalized_parity(n).unwrap();
            assert!((pt_norm(&u(n, 0), &eta).unwrap() - 1.0).norm() < 1e-15);
            for l in 1..n {
                let value = pt_norm(&u(n, l), &eta).unwrap();
                if classify(n, l).is_real() {
                    assert!((value - 1.0).norm() < 1e-15);
                } else {
                    assert!(value.norm() < 1e-14, "n={n} l={l} {value}");
                }
            }
        }
        let eta = generalized_parity(3).unwrap();
        assert!(pt_norm(&u(4, 1), &eta).is_err());
    }

    #[test]
    fn pair_products_three() {
        let eta = generalized_parity(3).unwrap();
        let partner = eta_pair_product(&u(3, 1), &u(3, 2), &eta).unwrap();
        assert!((partner.sesquilinear - 1.0).norm() < 1e-15);
        let own = eta_pair_product(&u(3, 1), &u(3, 1), &eta).unwrap();
        assert!(own.sesquilinear.norm() < 1e-15);
        for n in 2..8 {
            let eta = generalized_parity(n).unwrap();
            let p = eta_pair_product(&u(n, 0), &u(n, 0), &eta).unwrap();
            assert!((p.bilinear - 1.0).norm() < 1e-15);
        }
        assert!(eta_pair_product(&u(3, 1), &u(4, 1), &eta).is_err());
    }

    #[test]
    fn report_summary() {
        let report = symmetry_report::<f64>(8).unwrap();
        assert_eq!(report.records.len(), 8);
        assert!(report.max_real_eigen_residual() < 1e-12);
        assert!(report.max_complex_pt_norm() < 1e-12);
        assert!(report.min_complex_eigen_residual().unwrap() > 0.1);
        let (ses_dev, _, _, bil_abs) = report.pair_product_extremes().unwrap();
        // the sesquilinear partner product is 1, the bilinear one vanishes
        assert!(ses_dev < 1e-12);
        assert!(bil_abs < 1e-12);
        assert!(symmetry_report::<f64>(2).unwrap().min_complex_eigen_residual().is_none());
    }
}
